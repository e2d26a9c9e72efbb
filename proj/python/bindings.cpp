#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "yfstab/runner.hpp"

namespace py = pybind11;
using namespace yfstab;

namespace {

using Triple = std::array<double, 3>;

Vec3 vec(const Triple& v) { return {v[0], v[1], v[2]}; }

SpatialEnvelope envelope(const Triple& centre, double width, double amplitude) {
  return SpatialEnvelope(vec(centre), width, amplitude);
}

ModelCurrent current_named(const std::string& name, Mass mass) {
  if (name == "onshell-nonzero") return onshell_nonzero_current(mass);
  if (name == "onshell-vanishing") return onshell_vanishing_current(mass);
  if (name == "zero") return zero_current();
  throw Error(ErrorCode::InvalidArgument, "unknown current \"" + name + "\"");
}

LineFunction line(std::function<cplx(double)> f, double support, bool smooth) {
  return LineFunction(std::move(f), support, smooth ? Smoothness::Smooth : Smoothness::C1);
}

py::dict quad_dict(const QuadResult& q) {
  py::dict d;
  d["value"] = q.value;
  d["error"] = q.error;
  return d;
}

py::dict gram_dict(const GramResult& g) {
  py::dict d;
  d["fixture_id"] = g.family_fixture_id;
  d["matrix"] = g.matrix;
  d["eigenvalues"] = g.eigenvalues;
  d["min_eigenvalue"] = g.min_eigenvalue;
  d["norm"] = g.norm;
  d["hermiticity_defect"] = g.hermiticity_defect;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Asymptotic-field stability engine and indefinite-metric counterexample";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "YfstabError", PyExc_RuntimeError);

  m.def("omega", [](const Triple& p, double mass) { return omega(vec(p), Mass(mass)); }, py::arg("p"),
        py::arg("mass"));
  m.def(
      "off_shellness",
      [](double k0, const Triple& p, double mass) { return off_shellness(FourVector{k0, vec(p)}, Mass(mass)); },
      py::arg("k0"), py::arg("p"), py::arg("mass"));

  m.def(
      "smear_mass_shell",
      [](double mass, std::function<cplx(double, const Triple&)> f, double cutoff, int sign, double rel_tol) {
        ShellOptions opt;
        opt.rel_tol = rel_tol;
        auto g = [&](const FourVector& k) { return f(k.e, Triple{k.p.x, k.p.y, k.p.z}); };
        return quad_dict(smear_mass_shell(Mass(mass), sign >= 0 ? ShellSign::Plus : ShellSign::Minus, g, cutoff, opt));
      },
      py::arg("mass"), py::arg("f"), py::arg("cutoff"), py::arg("sign") = 1, py::arg("rel_tol") = 1e-6,
      "f(k0, (kx, ky, kz)) integrated against theta(sign k0) delta(k^2 - mass^2)");
  m.def(
      "principal_value",
      [](std::function<cplx(double)> f, double support, bool smooth) {
        return quad_dict(principal_value(line(std::move(f), support, smooth)));
      },
      py::arg("f"), py::arg("support") = std::numeric_limits<double>::infinity(), py::arg("smooth") = true);
  m.def(
      "boundary_value_pairing",
      [](std::function<cplx(double)> f, const std::string& side, double support, bool smooth) {
        if (side != "+" && side != "-") throw Error(ErrorCode::InvalidArgument, "side must be \"+\" or \"-\"");
        return quad_dict(boundary_value_pairing(line(std::move(f), support, smooth),
                                                side == "+" ? Side::PlusI0 : Side::MinusI0));
      },
      py::arg("f"), py::arg("side"), py::arg("support") = std::numeric_limits<double>::infinity(),
      py::arg("smooth") = true);

  py::class_<StabilityEngine>(m, "StabilityEngine")
      .def(py::init([](const std::string& current, double mass, const Triple& centre, double width,
                       double amplitude) {
             return StabilityEngine(current_named(current, Mass(mass)), envelope(centre, width, amplitude),
                                    Mass(mass));
           }),
           py::arg("current") = "onshell-nonzero", py::arg("mass") = 2.0, py::arg("centre") = Triple{0, 0, 0},
           py::arg("width") = 1.0, py::arg("amplitude") = 1.0)
      .def_property_readonly("w_tilde_zero", [](const StabilityEngine& e) { return e.w_tilde().at_zero; })
      .def_property_readonly("r0", [](const StabilityEngine& e) { return e.w_tilde().r0; })
      .def("w_tilde", [](const StabilityEngine& e, double kappa) { return e.w_tilde().fn(kappa); })
      .def("pairing", [](const StabilityEngine& e, int n) { return quad_dict(e.pairing(n)); })
      .def(
          "kl_norm",
          [](const StabilityEngine& e, int n, const std::string& rho_json) {
            const QuadResult q = e.kl_norm(n, SpectralMeasure::from_json(nlohmann::json::parse(rho_json)));
            py::dict d;
            d["value"] = q.value.real();
            d["error"] = q.error;
            return d;
          },
          py::arg("n"), py::arg("rho_json"));

  m.def(
      "in_out_difference",
      [](const std::string& current, double mass, cplx temporal, const Triple& centre, double width,
         double amplitude) {
        const WavePacket h(LineFunction::constant(temporal), envelope(centre, width, amplitude), Mass(mass));
        return in_out_difference(current_named(current, Mass(mass)), Mass(mass), h);
      },
      py::arg("current"), py::arg("mass") = 2.0, py::arg("temporal") = cplx(1.0), py::arg("centre") = Triple{0, 0, 0},
      py::arg("width") = 1.0, py::arg("amplitude") = 1.0,
      "constant-temporal packet on the mass shell");

  m.def(
      "p_factor", [](int alpha, double ksq, double mu, double mass) {
        return p_factor(alpha, ksq, ModelParams(Mass(mu), Mass(mass)));
      },
      py::arg("alpha"), py::arg("ksq"), py::arg("mu") = 0.5, py::arg("m") = 2.0);

  m.def(
      "witness_gram",
      [](double mu, double mass, bool subfamily, int workers) {
        const ModelParams p{Mass(mu), Mass(mass)};
        ThreePointOptions opt;
        opt.workers = workers;
        GramResult g;
        {
          py::gil_scoped_release release;
          g = gram_matrix(subfamily ? positive_subfamily(p) : witness_family(p), p, opt);
        }
        return gram_dict(g);
      },
      py::arg("mu") = 0.5, py::arg("m") = 2.0, py::arg("subfamily") = false, py::arg("workers") = 1);

  m.def(
      "decay_amplitude",
      [](double mu, double mass, std::size_t samples, std::uint64_t seed, int workers, bool disjoint) {
        const ModelParams p{Mass(mu), Mass(mass)};
        DecayOptions opt;
        opt.samples = samples;
        opt.seed = seed;
        opt.workers = workers;
        DecayResult r;
        {
          py::gil_scoped_release release;
          const auto h = disjoint ? disjoint_decay_packets(p) : decay_packets(p);
          r = decay_amplitude(h[0], h[1], h[2], p, opt);
        }
        return r.to_json().dump();
      },
      py::arg("mu") = 0.5, py::arg("m") = 2.0, py::arg("samples") = 1000000, py::arg("seed") = 1,
      py::arg("workers") = 1, py::arg("disjoint") = false, "record as a JSON string");

  m.def("preset", [](const std::string& name) { return preset(name).dump(); }, py::arg("name"));
  m.def(
      "resolve_config", [](const std::string& text) { return parse_config_text(text).to_json().dump(); },
      py::arg("text"), "validated document with every default filled, as a JSON string");
  m.def(
      "run",
      [](const std::string& text) {
        const RunConfig c = parse_config_text(text);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(c);
        }
        return py::make_tuple(r.summary.dump(), r.files);
      },
      py::arg("text"), "runs a configuration; returns (summary JSON, written files)");
}
