#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vlcq/analysis.hpp"
#include "vlcq/codebook.hpp"
#include "vlcq/core_math.hpp"
#include "vlcq/quantizer.hpp"
#include "vlcq/simulate.hpp"
#include "vlcq/toy_sources.hpp"

namespace py = pybind11;
using namespace vlcq;

namespace {

ChannelVector to_channel(const std::vector<Complex>& h) { return ChannelVector{h}; }

py::dict result_dict(const SimConfig& c, const SimResult& r) {
  py::dict d;
  d["mode"] = c.mode_name();
  d["t"] = c.params.t;
  d["rho"] = c.params.rho;
  d["P"] = c.params.power;
  d["alpha"] = c.params.alpha;
  d["ell_max"] = c.ell_max;
  d["n_samples"] = c.n_samples;
  d["out_hat"] = r.out_hat;
  d["out_se"] = r.out_se;
  d["closed_full"] = r.closed_full;
  d["closed_open"] = r.closed_open;
  d["rate_bstar_hat"] = r.rate_bstar_hat;
  d["rate_prefix_hat"] = r.rate_prefix_hat;
  d["rate_se"] = r.rate_se;
  d["truncation_frac"] = r.truncation_frac;
  d["mean_index"] = r.mean_index;
  d["seed"] = c.seed;
  d["layer_sizes"] = r.layer_sizes;
  d["tail_counts"] = r.tail_counts;
  return d;
}

SimConfig make_config(int t, double rho, double p, const std::string& mode, int ell_max, std::uint64_t samples,
                      std::uint64_t seed, unsigned shards) {
  SimConfig c;
  c.params = SystemParams::make(t, rho, p);
  c.mode = parse_mode(mode, c.flq_size);
  c.ell_max = ell_max;
  c.n_samples = samples;
  c.seed = seed;
  c.shards = shards;
  return c;
}

}  // namespace

PYBIND11_MODULE(_vlcq, m) {
  m.doc() = "Variable-length channel quantization for outage-limited beamforming";

  py::register_exception<std::domain_error>(m, "DomainError", PyExc_ValueError);

  m.def("alpha_of", &alpha_of, py::arg("rho"), py::arg("power"));
  m.def("out_full_closed", &out_full_closed, py::arg("t"), py::arg("alpha"));
  m.def("out_open_closed", &out_open_closed, py::arg("alpha"));

  m.def("grid_values", &grid_values, py::arg("ell"));
  m.def("scalar_quantize", &scalar_quantize, py::arg("x"), py::arg("ell"));
  m.def("layer_sizes", &count_layer_sizes, py::arg("t"), py::arg("ell_max"),
        "Cumulative codebook sizes |Y_0|, ..., |Y_ell_max|.");
  m.def(
      "codebook",
      [](int t, int ell_max) {
        const CodebookStream s(t, ell_max);
        std::vector<std::vector<std::int64_t>> out;
        out.reserve(s.size());
        s.for_each([&](std::uint64_t, std::span<const std::int64_t> p, std::int64_t) {
          out.emplace_back(p.begin(), p.end());
          return true;
        });
        return out;
      },
      py::arg("t"), py::arg("ell_max"), "Primitive integer directions in codebook order.");
  m.def(
      "unit_vector", [](const std::vector<std::int64_t>& p) { return unit_vector_of(p); }, py::arg("p"));
  m.def(
      "gain", [](const std::vector<std::int64_t>& p, const std::vector<Complex>& h) { return gain(p, to_channel(h)); },
      py::arg("p"), py::arg("h"));
  m.def(
      "covering_witness",
      [](const std::vector<Complex>& h_bar, int ell) {
        const auto w = covering_witness(to_channel(h_bar), ell);
        return std::vector<std::int64_t>(w.key.coords().begin(), w.key.coords().end());
      },
      py::arg("h_bar"), py::arg("ell"));

  m.def("length_bstar", &length_bstar, py::arg("n"));
  m.def("length_prefix_free", &length_prefix_free, py::arg("n"));
  m.def("codeword_bstar", &codeword_bstar, py::arg("n"));
  m.def("codeword_prefix_free", &codeword_prefix_free, py::arg("n"));
  m.def(
      "encode_vlq",
      [](const std::vector<Complex>& h, double alpha, int ell_max) {
        const auto ch = to_channel(h);
        const CodebookStream s(ch.t(), ell_max);
        const auto o = encode_vlq(ch, s, alpha);
        py::dict d;
        d["index"] = o.index;
        d["outage"] = o.outage;
        d["truncated"] = o.truncated;
        d["len_bstar"] = o.len_bstar;
        d["len_prefix"] = o.len_prefix;
        return d;
      },
      py::arg("h"), py::arg("alpha"), py::arg("ell_max") = 4);

  m.def(
      "simulate",
      [](int t, double rho, double p, const std::string& mode, int ell_max, std::uint64_t samples,
         std::uint64_t seed, unsigned shards) {
        const SimConfig c = make_config(t, rho, p, mode, ell_max, samples, seed, shards);
        SimResult r;
        {
          py::gil_scoped_release release;
          r = run(c);
        }
        return result_dict(c, r);
      },
      py::arg("t") = 2, py::arg("rho") = 1.0, py::arg("P") = 10.0, py::arg("mode") = "vlq", py::arg("ell_max") = 4,
      py::arg("samples") = 100000, py::arg("seed") = 1, py::arg("shards") = 1);
  m.def(
      "sweep_csv",
      [](int t, double rho, const std::vector<double>& grid, const std::string& mode, int ell_max,
         std::uint64_t samples, std::uint64_t seed, unsigned shards) {
        std::vector<SimConfig> cfgs;
        for (double p : grid) cfgs.push_back(make_config(t, rho, p, mode, ell_max, samples, seed, shards));
        std::ostringstream os;
        {
          py::gil_scoped_release release;
          write_csv(os, sweep(cfgs));
        }
        return os.str();
      },
      py::arg("t"), py::arg("rho"), py::arg("p_grid"), py::arg("mode") = "vlq", py::arg("ell_max") = 4,
      py::arg("samples") = 100000, py::arg("seed") = 1, py::arg("shards") = 1);

  m.def("find_ell0", &find_ell0, py::arg("t"));
  m.def("tail_bound", &tail_bound, py::arg("t"), py::arg("alpha"), py::arg("ell"));
  m.def(
      "rate_upper_bound",
      [](int t, double alpha, const std::vector<std::uint64_t>& sizes) { return rate_upper_bound(t, alpha, sizes).rate_bound; },
      py::arg("t"), py::arg("alpha"), py::arg("layer_sizes"));
  m.def("converse_floor", &converse_floor, py::arg("alpha"), py::arg("rate"));
  m.def(
      "fit_decay_slope",
      [](const std::vector<std::pair<double, double>>& pts) { return fit_decay_slope(pts); }, py::arg("points"));
  m.def(
      "verify",
      [](int t, double rho, double p, int ell_max, std::uint64_t samples, std::uint64_t seed) {
        VerifyConfig c{t, rho, p, ell_max, samples, seed, 1};
        VerifyReport rep;
        {
          py::gil_scoped_release release;
          rep = run_verification(c);
        }
        py::list checks;
        for (const auto& ck : rep.checks) {
          py::dict d;
          d["name"] = ck.name;
          d["passed"] = ck.passed;
          d["margin"] = ck.margin;
          d["detail"] = ck.detail;
          checks.append(d);
        }
        return py::make_tuple(rep.all_passed(), checks);
      },
      py::arg("t") = 2, py::arg("rho") = 1.0, py::arg("P") = 10.0, py::arg("ell_max") = 4,
      py::arg("samples") = 100000, py::arg("seed") = 1);

  m.def("toy_probability", &toy_probability, py::arg("n"));
  m.def("toy_cumulative", &toy_cumulative, py::arg("n"));
  m.def(
      "toy_vlq_rate",
      [](std::uint64_t n) {
        const auto b = toy_vlq_rate(n);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("n_trunc"));
  m.def("toy_flq_distortion", &toy_flq_distortion, py::arg("levels"));
  m.def("example2_encode", &example2_encode, py::arg("x"));
}
