#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ozlab/coarse_grain.hpp"
#include "ozlab/error.hpp"
#include "ozlab/io.hpp"
#include "ozlab/oz_fit.hpp"
#include "ozlab/renewal.hpp"
#include "ozlab/weights.hpp"
#include "ozlab/wulff.hpp"

namespace py = pybind11;
using namespace ozlab;

namespace {

using Coords = std::vector<int>;

LatticePoint point(const Coords& c) { return LatticePoint(std::span<const int>(c)); }
DualVector dual(const std::vector<double>& c) { return DualVector(std::span<const double>(c)); }

Coords coords(const LatticePoint& x) {
  Coords c(static_cast<std::size_t>(x.dim()));
  for (int i = 0; i < x.dim(); ++i) c[static_cast<std::size_t>(i)] = x[i];
  return c;
}

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

// {(x..., n): coefficient}
py::dict series_dict(const SpaceLengthSeries& s) {
  py::dict d;
  for (const auto& [a, c] : s.atoms()) d[py::make_tuple(py::tuple(py::cast(coords(a.x))), a.n)] = c;
  return d;
}

std::vector<CorrelationEstimate> estimates(const std::vector<Coords>& xs, const std::vector<double>& mean,
                                           const std::vector<double>& err) {
  require(xs.size() == mean.size() && (err.empty() || err.size() == mean.size()), ErrorKind::usage,
          "x, mean and stderr must have the same length");
  std::vector<CorrelationEstimate> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CorrelationEstimate e;
    e.x = point(xs[i]);
    e.mean = mean[i];
    e.stderr_ = err.empty() ? 0.0 : err[i];
    out.push_back(e);
  }
  return out;
}

py::dict estimate_dict(const std::vector<CorrelationEstimate>& est) {
  std::vector<Coords> xs;
  std::vector<double> mean, err, tau;
  std::vector<std::size_t> n;
  for (const auto& e : est) {
    xs.push_back(coords(e.x));
    mean.push_back(e.mean);
    err.push_back(e.stderr_);
    tau.push_back(e.tau_int);
    n.push_back(e.n_samples);
  }
  py::dict d;
  d["x"] = xs;
  d["mean"] = mean;
  d["stderr"] = err;
  d["tau_int"] = tau;
  d["n_samples"] = n;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ozlab, m) {
  m.doc() = "SAW enumeration, renewal decomposition, Wulff bodies and Ising sampling";

  static py::exception<Error> exc(m, "OzlabError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, py::make_tuple(to_string(e.kind()), e.what()));
    }
  });

  m.attr("__version__") = version();

  py::class_<TwoPointTable>(m, "TwoPointTable")
      .def_property_readonly("dim", &TwoPointTable::dim)
      .def_property_readonly("horizon", &TwoPointTable::horizon)
      .def("count", [](const TwoPointTable& t, const Coords& x, int n) { return t.count(point(x), n); })
      .def("walks_of_length", &TwoPointTable::walks_of_length)
      .def("total_at", [](const TwoPointTable& t, const Coords& x) { return t.total_at(point(x)); })
      .def("series", [](const TwoPointTable& t) { return series_dict(t.series()); })
      .def("tilted_susceptibility",
           [](const TwoPointTable& t, const std::vector<double>& z) { return tilted_susceptibility(t, dual(z)); })
      .def("decay_rate", [](const TwoPointTable& t, const Coords& v) {
        const auto e = decay_rate_estimate(t, point(v));
        return py::make_tuple(e.value, e.lower, e.upper);
      });

  m.def(
      "enumerate_two_point",
      [](double beta, int dim, int max_len, unsigned threads) {
        EnumerationOptions o;
        o.threads = threads;
        py::gil_scoped_release release;
        return enumerate_two_point(saw_model(beta, dim), max_len, o);
      },
      py::arg("beta"), py::arg("dim"), py::arg("max_len"), py::arg("threads") = 0);

  py::class_<DirectCorrelation>(m, "DirectCorrelation")
      .def_readonly("horizon", &DirectCorrelation::horizon)
      .def_property_readonly("direction", [](const DirectCorrelation& d) { return d.direction.components(); })
      .def("bulk", [](const DirectCorrelation& d) { return series_dict(d.bulk); })
      .def("left", [](const DirectCorrelation& d) { return series_dict(d.left); })
      .def("right", [](const DirectCorrelation& d) { return series_dict(d.right); })
      .def("residual", [](const DirectCorrelation& d, const TwoPointTable& t) { return renewal_residual(t, d); })
      .def("perron_root", [](const DirectCorrelation& d, const std::vector<double>& z) { return perron_root(d, dual(z)); })
      .def("boundary",
           [](const DirectCorrelation& d, const std::vector<double>& n) { return solve_boundary(d, dual(n)).components(); })
      .def("tilted_step_mass",
           [](const DirectCorrelation& d, const std::vector<double>& z) { return tilted_step_mass(d, dual(z)); })
      .def("extrapolate", [](const DirectCorrelation& d, const std::vector<Coords>& xs) {
        std::vector<LatticePoint> pts;
        for (const auto& x : xs) pts.push_back(point(x));
        const auto g = oz_extrapolate(d, pts);
        std::vector<double> out;
        for (const auto& x : pts) out.push_back(g.at(x));
        return out;
      });

  m.def(
      "direct_correlation",
      [](double beta, int dim, int max_len, const std::vector<double>& t) {
        py::gil_scoped_release release;
        return direct_correlation(saw_model(beta, dim), dual(t), max_len);
      },
      py::arg("beta"), py::arg("dim"), py::arg("max_len"), py::arg("t"));

  m.def("regeneration_points", [](const std::vector<Coords>& path, const std::vector<double>& t) {
    std::vector<LatticePoint> v;
    for (const auto& x : path) v.push_back(point(x));
    return regeneration_points(LatticePath(v), dual(t));
  });

  py::class_<WulffBody>(m, "WulffBody")
      .def_static("circle", &WulffBody::circle, py::arg("radius"), py::arg("resolution"))
      .def_property_readonly("dim", &WulffBody::dim)
      .def_property_readonly("horizon", &WulffBody::horizon)
      .def("radii", &WulffBody::radii)
      .def("xi", [](const WulffBody& b, const Coords& x) { return b.xi(point(x)); })
      .def("support", [](const WulffBody& b, const std::vector<double>& x) { return b.support(dual(x)); })
      .def("contact_dual",
           [](const WulffBody& b, const std::vector<double>& x) { return b.contact_dual(dual(x)).components(); })
      .def("support_consistency",
           [](const WulffBody& b, double tol) {
             const auto r = b.support_consistency(tol);
             return py::make_tuple(r.pass, r.worst);
           },
           py::arg("tol") = 1e-6)
      .def("curvature",
           [](const WulffBody& b) {
             const auto k = curvature(b);
             py::dict d;
             d["angle"] = k.angle;
             d["kappa"] = k.kappa;
             d["err"] = k.err;
             d["kappa_min"] = k.kappa_min;
             d["kappa_min_err"] = k.kappa_min_err;
             d["spikes"] = k.spikes;
             return d;
           })
      .def("to_json", [](const WulffBody& b) { return to_py(b.to_json()); });

  m.def(
      "build_body",
      [](double beta, int dim, int max_len, int resolution) {
        py::gil_scoped_release release;
        return build_body(saw_model(beta, dim), max_len, resolution);
      },
      py::arg("beta"), py::arg("dim"), py::arg("max_len"), py::arg("resolution") = 64);

  m.def("skeleton", [](const std::vector<Coords>& path, double K, const WulffBody& body) {
    std::vector<LatticePoint> v;
    for (const auto& x : path) v.push_back(point(x));
    const auto sk = build_skeleton(LatticePath(v), K, body);
    std::vector<Coords> pts;
    for (const auto& p : sk.points) pts.push_back(coords(p));
    return pts;
  });

  m.def(
      "surcharge_histogram",
      [](double beta, int max_len, double K, const Coords& x, const WulffBody& body) {
        const auto xp = point(x);
        DualVector dir(xp.dim());
        for (int i = 0; i < xp.dim(); ++i) dir[i] = xp[i];
        const auto h = surcharge_histogram(saw_model(beta, xp.dim()), max_len, K, xp, body.contact_dual(dir), body);
        return py::make_tuple(h.weight, h.backtracking_fraction());
      },
      py::arg("beta"), py::arg("max_len"), py::arg("K"), py::arg("x"), py::arg("body"));

  m.def("axioms", [](double beta, int dim, int max_len) {
    const auto model = saw_model(beta, dim);
    py::dict d;
    d["finite_energy"] = to_py(check_finite_energy(*model, max_len).to_json());
    d["splitting"] = to_py(check_splitting(*model, max_len).to_json());
    d["mixing"] = to_py(check_mixing(*model, max_len).to_json());
    return d;
  });

  m.def(
      "ising_correlation",
      [](const py::object& config, int sweeps, std::uint64_t seed, const std::vector<Coords>& xs, int burn_in,
         unsigned chains, const std::string& estimator) {
        const auto cfg = validate_config(from_py(config));
        const auto model = ising_model_from_config(cfg);
        const auto lattice = lattice_from_config(cfg);
        std::vector<LatticePoint> pts;
        for (const auto& x : xs) pts.push_back(point(x));
        SampleOptions o;
        o.burn_in = burn_in;
        o.chains = chains;
        require(estimator == "cluster" || estimator == "spin", ErrorKind::usage, "estimator must be cluster or spin");
        o.estimator = estimator == "spin" ? CorrelationEstimator::spin : CorrelationEstimator::cluster;
        std::vector<CorrelationEstimate> est;
        {
          py::gil_scoped_release release;
          est = measure_correlation(wolff_sample(model, lattice, sweeps, seed, pts, o), pts);
        }
        return estimate_dict(est);
      },
      py::arg("config"), py::arg("sweeps"), py::arg("seed"), py::arg("x"), py::arg("burn_in") = 1000,
      py::arg("chains") = 1, py::arg("estimator") = "cluster");

  m.def("validate_config", [](const py::object& c) { return to_py(validate_config(from_py(c))); });

  m.def("strip_xi", [](double beta, int width) { return strip_transfer_matrix(IsingModel::nearest_neighbor(2, beta), width).xi; });
  m.def("onsager_axis_xi", &onsager_axis_xi);
  m.def("onsager_nn_correlation", &onsager_nn_correlation);

  m.def(
      "oz_fit",
      [](const std::vector<Coords>& xs, const std::vector<double>& mean, const std::vector<double>& err,
         const std::vector<double>& direction, double x_min, double x_max) {
        const auto est = estimates(xs, mean, err);
        const int dim = static_cast<int>(direction.size());
        return to_py(oz_fit(est, dual(direction), dim, FitWindow{x_min, x_max}).to_json());
      },
      py::arg("x"), py::arg("mean"), py::arg("stderr") = std::vector<double>{}, py::arg("direction"),
      py::arg("x_min") = 0.0, py::arg("x_max") = std::numeric_limits<double>::infinity());
}
