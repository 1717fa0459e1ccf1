#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qsel/harness.hpp"

namespace py = pybind11;
using namespace qsel;

namespace {

Isogeny isogeny_arg(const std::string& text) {
  const auto id = parse_isogeny(text);
  if (!id) throw py::value_error("unknown map '" + text + "'");
  return *id;
}

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["n"] = r.n;
  d["h"] = r.h;
  d["dim_sel"] = r.dim_sel;
  d["dim_sel2"] = r.dim_sel2;
  d["ls_phi1"] = r.phi1.ls;
  d["sol_lo_phi1"] = r.phi1.sol_lo;
  d["sol_hi_phi1"] = r.phi1.sol_hi;
  d["ls_phihat1"] = r.phihat1.ls;
  d["sls_phihat1"] = r.phihat1.sls.value_or(0);
  d["sol_lo_phihat1"] = r.phihat1.sol_lo;
  d["sol_hi_phihat1"] = r.phihat1.sol_hi;
  d["rank_lo"] = r.rank_lo;
  d["rank_hi"] = r.rank_hi;
  d["H"] = r.height;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Selmer groups and quartic solubility for y^2 = x^3 - n^2 x";

  m.def("jacobi", &jacobi, py::arg("a"), py::arg("n"));
  m.def("is_squarefree", &is_squarefree, py::arg("n"));

  m.def(
      "selmer",
      [](i64 n, const std::string& map) {
        std::vector<i64> out;
        for (const SquareClass& c : selmer_isogeny(n, isogeny_arg(map)).classes) out.push_back(c.rep());
        return out;
      },
      py::arg("n"), py::arg("map"), "Square-class representatives of the Selmer group of one 2-isogeny.");

  m.def(
      "sel2",
      [](i64 n) {
        std::vector<std::pair<i64, i64>> out;
        for (const Sel2Pair& e : sel2_pairs(n).pairs) out.emplace_back(e.delta1.rep(), e.delta2.rep());
        return out;
      },
      py::arg("n"), "2-Selmer group as (class of x, class of x - n) pairs.");

  m.def(
      "rank_bounds",
      [](i64 n, i64 height) {
        const RankInfo r = rank_info(n, height);
        return py::make_tuple(r.rank_lower, r.rank_upper, r.certified_zero);
      },
      py::arg("n"), py::arg("height") = kSweepHeight);

  m.def(
      "classify",
      [](i64 a, i64 b, i64 c, i64 n, i64 height) {
        for (const IsogenyDescriptor& d : descriptors()) {
          const FamilySpec spec = d.family(n);
          if (spec.B != b || static_cast<i128>(a) * c != static_cast<i128>(spec.M)) continue;
          const Classification cl = classify_form({Rational(a), b, Rational(c)}, n, d.id, height);
          py::dict out;
          out["family"] = std::string(name(d.id));
          out["status"] = std::string(name(cl.status));
          out["reason"] = std::string(name(cl.reason));
          out["torsion"] = cl.torsion;
          if (cl.witness)
            out["witness"] = py::make_tuple(py::int_(py::str(cl.witness->x.str())), py::int_(py::str(cl.witness->y.str())),
                                            py::int_(py::str(cl.witness->z.str())));
          else
            out["witness"] = py::none();
          out["render"] = cl.render();
          return out;
        }
        throw py::value_error("form is in no quartic family at this n");
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("n"), py::arg("height") = kQueryHeight);

  m.def(
      "sweep",
      [](i64 xmax, i64 height, int threads) {
        SweepOptions opt;
        opt.xmax = xmax;
        opt.height = height;
        opt.threads = threads;
        std::ostringstream err;
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = sweep_rows(opt, err);
        }
        py::list out;
        for (const SweepRow& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("xmax"), py::arg("height") = kSweepHeight, py::arg("threads") = 1);

  m.def("csv_header", &csv_header);
  m.attr("SWEEP_HEIGHT") = kSweepHeight;
  m.attr("QUERY_HEIGHT") = kQueryHeight;
}
