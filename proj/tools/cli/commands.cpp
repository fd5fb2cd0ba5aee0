#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cli/svg.hpp"
#include "sse/csv.hpp"
#include "sse/errors.hpp"
#include "sse/estimator.hpp"
#include "sse/parallel.hpp"
#include "sse/reduction.hpp"
#include "sse/spectral.hpp"

namespace sse::cli {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string indexed(const char* stem, std::size_t i, const char* ext = "csv") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%02zu.%s", stem, i, ext);
  return buf;
}

std::string per_n(const char* stem, std::size_t n, const char* ext = "csv") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%zu.%s", stem, n, ext);
  return buf;
}

SystemParams at_size(const SystemParams& p, std::size_t n) {
  return n == p.n_bath ? p : scale_to(p, n);
}

std::vector<std::size_t> sizes_or(const RunConfig& c, std::vector<std::size_t> fallback) {
  return c.n_list.empty() ? fallback : c.n_list;
}

std::vector<double> in_sse(const std::vector<double>& omegas, const SystemParams& p) {
  std::vector<double> v(omegas);
  const double s = p.omega_sse();
  if (s > 0.0)
    for (double& w : v) w /= s;
  return v;
}

void maybe_svg(const RunConfig& c, RunOutput& out, const std::string& name, const PlotSpec& spec,
               const std::vector<Series>& series) {
  if (c.svg) out.write_text(name, render_svg(spec, series, provenance_line(out.hash(), c.command)));
}

void say(const Progress& p, const std::string& msg) {
  if (p) p(msg);
}

std::pair<cplx, cplx> initial_heads(const RunConfig& c, const SystemParams& q) {
  switch (c.init) {
    case InitMode::unit:
      return {1.0, 1.0};
    case InitMode::eigenplus: {
      if (!(q.omega_big > 0.0)) throw InvalidArgument("eigenplus initial state needs Omega > 0");
      const auto e = nh_eigensystem(reduce(q)).e_plus;
      return {e[0], e[1]};
    }
    case InitMode::random:
      break;
  }
  return random_phase_state(c.seed, 0);
}

nlohmann::json run_eigenprofile(const RunConfig& c, RunOutput& out, const Progress& progress) {
  struct Row {
    std::size_t n;
    double omega;
    int component;
    std::optional<PeakFeatures> f;
  };
  std::vector<Row> rows;
  nlohmann::json res = nlohmann::json::object();
  for (std::size_t n : sizes_or(c, {c.params.n_bath})) {
    const SystemParams base = at_size(c.params, n);
    for (std::size_t i = 0; i < c.omegas.size(); ++i) {
      say(progress, "eigenprofile N=" + std::to_string(n) + " point " + std::to_string(i + 1) +
                        "/" + std::to_string(c.omegas.size()));
      const SystemParams q = with_omega(base, c.omegas[i]);
      const EigenBasis b = diagonalize(build_matrix(q));
      const std::string stem = "eigenprofile_N" + std::to_string(n) + "_W";
      out.write_csv(indexed(stem.c_str(), i), [&](std::ostream& o) { write_eigenprofile_csv(o, b); });
      std::vector<Series> series;
      for (Head j : {Head::first, Head::second}) {
        const auto prof = component_profile(b, j);
        rows.push_back({n, c.omegas[i], static_cast<int>(j), peak_features(prof)});
        Series s{j == Head::first ? "e1^2" : "e2^2", {}, {}};
        for (const auto& pt : prof.points) {
          s.x.push_back(pt.freq - q.omega0);
          s.y.push_back(pt.value * pt.value);
        }
        series.push_back(std::move(s));
      }
      maybe_svg(c, out, indexed(stem.c_str(), i, "svg"),
                {"eigenstate components, Omega/Omega_SSE = " + csv::num(c.omegas[i] / q.omega_sse()),
                 "f - omega0", "squared component", false},
                series);
    }
    if (c.threshold) {
      say(progress, "split threshold bisection N=" + std::to_string(n));
      const double s = base.omega_sse();
      const double w = find_split_threshold(base, 0.25 * s, 4.0 * s, 1e-3 * s);
      res["split_threshold"].push_back({{"n_bath", n}, {"omega", w}, {"omega_over_sse", w / s}});
    }
  }
  out.write_csv("eigen_features.csv", [&](std::ostream& o) {
    csv::header(o, "n_bath,omega,component,peak_count,half_height_split,max_height,total_width,"
                   "max_offset");
    for (const auto& r : rows) {
      if (!r.f) {
        csv::row(o, {double(r.n), r.omega, double(r.component), 0, 0, nan, nan, nan});
        continue;
      }
      const double off = r.f->offsets.empty()
                             ? nan
                             : *std::max_element(r.f->offsets.begin(), r.f->offsets.end());
      csv::row(o, {double(r.n), r.omega, double(r.component), double(r.f->peak_count),
                   r.f->half_height_split ? 1.0 : 0.0, r.f->max_height(), r.f->total_width, off});
    }
  });
  res["profiles"] = rows.size() / 2;
  return res;
}

nlohmann::json curve_summary(const RatioCurve& curve, const SystemParams& p) {
  nlohmann::json j;
  j["first_ratio"] = curve.points.front().ratio;
  j["last_ratio"] = curve.points.back().ratio;
  if (curve.points.size() >= 2) {
    j["knee_omega"] = knee_omega(curve);
    j["knee_over_sse"] = knee_omega(curve) / p.omega_sse();
  }
  return j;
}

Series ratio_series(const RatioCurve& curve, const SystemParams& p, std::string name) {
  Series s{std::move(name), {}, {}};
  for (const auto& pt : curve.points) {
    s.x.push_back(pt.omega / p.omega_sse());
    s.y.push_back(pt.ratio);
  }
  return s;
}

nlohmann::json run_ratio_sweep(const RunConfig& c, RunOutput& out, unsigned threads,
                               const Progress& progress) {
  say(progress, "ratio sweep over " + std::to_string(c.omegas.size()) + " couplings");
  const auto curve =
      ratio_sweep(c.params, c.omegas, c.t_max_tr, {c.init, c.ensemble, c.seed}, threads);
  out.write_csv("ratio.csv", [&](std::ostream& o) { write_ratio_csv(o, curve); });
  maybe_svg(c, out, "ratio.svg", {"<|a1|>/<|a2|>", "Omega / Omega_SSE", "ratio", false},
            {ratio_series(curve, c.params, "N=" + std::to_string(c.params.n_bath))});
  return curve_summary(curve, c.params);
}

nlohmann::json run_scaling_study(const RunConfig& c, RunOutput& out, unsigned threads,
                                 const Progress& progress) {
  const auto ns = sizes_or(c, {50, 100, 200, 400});
  const double s = c.params.omega_sse();
  std::vector<std::pair<std::size_t, RatioCurve>> curves;
  std::vector<Series> series;
  for (std::size_t n : ns) {
    say(progress, "scaling study N=" + std::to_string(n));
    const SystemParams q = at_size(c.params, n);
    auto curve = ratio_sweep(q, c.omegas, c.t_max_tr, {c.init, c.ensemble, c.seed}, threads);
    out.write_csv(per_n("ratio_N", n), [&](std::ostream& o) { write_ratio_csv(o, curve); });
    series.push_back(ratio_series(curve, q, "N=" + std::to_string(n)));
    curves.emplace_back(n, std::move(curve));
  }
  nlohmann::json res = nlohmann::json::array();
  std::vector<double> sharp;
  for (const auto& [n, curve] : curves) {
    const double m = curve.points.size() >= 2 ? max_slope_in(curve, 0.5 * s, 1.5 * s) * s : nan;
    const double k = curve.points.size() >= 2 ? knee_omega(curve) : nan;
    sharp.push_back(m);
    res.push_back({{"n_bath", n}, {"sharpness", m}, {"knee_omega", k}});
  }
  out.write_csv("sharpness.csv", [&](std::ostream& o) {
    csv::header(o, "n_bath,sharpness,knee_omega");
    for (std::size_t i = 0; i < curves.size(); ++i)
      csv::row(o, {double(curves[i].first), sharp[i], res[i]["knee_omega"].get<double>()});
  });
  for (std::size_t i = 1; i < sharp.size(); ++i)
    if (!(sharp[i] > sharp[i - 1]))
      out.warn("sharpness not increasing between N=" + std::to_string(ns[i - 1]) + " and N=" +
               std::to_string(ns[i]));
  maybe_svg(c, out, "scaling.svg", {"<|a1|>/<|a2|> vs N", "Omega / Omega_SSE", "ratio", false},
            series);
  return {{"sharpness", res}};
}

nlohmann::json run_nh_compare(const RunConfig& c, RunOutput& out, unsigned threads,
                              const Progress& progress) {
  const double tr = c.params.t_return();
  const double t_max = c.t_max_tr * tr;
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < c.omegas.size(); ++i) {
    say(progress, "trajectory comparison " + std::to_string(i + 1) + "/" +
                      std::to_string(c.omegas.size()));
    const SystemParams q = with_omega(c.params, c.omegas[i]);
    const auto [a1, a2] = initial_heads(c, q);
    const EigenBasis b = diagonalize(build_matrix(q));
    const TimeGrid grid = sampling_grid(q, t_max);
    const auto full = propagate(b, project_initial(b, InitialState::heads(a1, a2)), grid);
    const auto nh = nh_propagate(reduce(q), {a1, a2}, grid);
    const auto dev = modulus_deviation(full, nh, std::max(std::abs(a1), std::abs(a2)));
    out.write_csv(indexed("nh_traj_W", i), [&](std::ostream& o) {
      csv::header(o, "t,abs_a1_full,abs_a2_full,abs_a1_nh,abs_a2_nh,dev_a1,dev_a2");
      for (std::size_t k = 0; k < grid.count; ++k)
        csv::row(o, {grid.at(k), std::abs(full.a1[k]), std::abs(full.a2[k]), std::abs(nh.a1[k]),
                     std::abs(nh.a2[k]), dev.head1[k], dev.head2[k]});
    });
    if (c.svg) {
      std::vector<Series> s(4);
      const char* names[] = {"|a1| full", "|a2| full", "|a1| reduced", "|a2| reduced"};
      for (int m = 0; m < 4; ++m) s[m].name = names[m];
      for (std::size_t k = 0; k < grid.count; ++k) {
        const double t = grid.at(k) / tr;
        const double v[] = {std::abs(full.a1[k]), std::abs(full.a2[k]), std::abs(nh.a1[k]),
                            std::abs(nh.a2[k])};
        for (int m = 0; m < 4; ++m) {
          s[m].x.push_back(t);
          s[m].y.push_back(v[m]);
        }
      }
      maybe_svg(c, out, indexed("nh_traj_W", i, "svg"),
                {"full vs reduced dynamics", "t / T_R", "modulus", false}, s);
    }
    points.push_back({{"omega", c.omegas[i]},
                      {"max_dev_early", dev.max_in(0.0, 0.3 * tr)},
                      {"max_dev_revival", dev.max_in(tr, 2.0 * tr)}});
  }
  for (auto& p : points)
    for (auto& v : p)
      if (v.is_number_float() && std::isnan(v.get<double>())) v = nullptr;

  std::vector<double> positive;
  for (double w : c.omegas)
    if (w > 0.0) positive.push_back(w);
  nlohmann::json res{{"trajectories", points}};
  if (!positive.empty()) {
    say(progress, "ratio overlay with e+ initial state");
    const auto herm = ratio_sweep(c.params, positive, c.t_max_tr,
                                  {InitMode::eigenplus, 1, c.seed}, threads);
    const auto red = nh_ratio_curve(c.params.gamma(), c.params.omega0, positive, t_max);
    out.write_csv("nh_ratio.csv", [&](std::ostream& o) {
      csv::header(o, "omega,ratio_hermitian,ratio_nh");
      for (std::size_t i = 0; i < positive.size(); ++i)
        csv::row(o, {positive[i], herm.points[i].ratio, red.points[i].ratio});
    });
    maybe_svg(c, out, "nh_ratio.svg", {"e+ initial state", "Omega / Omega_SSE", "ratio", false},
              {ratio_series(herm, c.params, "full"), ratio_series(red, c.params, "reduced")});
    if (positive.size() >= 2) {
      res["knee_full"] = knee_omega(herm);
      res["knee_reduced"] = knee_omega(red);
    }
  } else {
    out.warn("no Omega > 0 in the list: ratio overlay skipped");
  }
  return res;
}

nlohmann::json run_noise_spectrum(const RunConfig& c, RunOutput& out, unsigned threads,
                                  const Progress& progress) {
  NhParams np = reduce(c.params);
  if (!(np.gamma > 0.0)) throw InvalidArgument("noise spectrum needs gamma > 0");
  const double s = c.params.omega_sse();
  const double lo = 0.5 * s, hi = 1.5 * s;
  double w_max = *std::max_element(c.omegas.begin(), c.omegas.end());
  if (c.threshold) w_max = std::max(w_max, hi);
  NoiseSpec noise;
  noise.temperature = c.temperature;
  noise.seed = c.seed;
  noise.n_realizations = c.realizations;
  noise.dt = c.noise_dt > 0.0 ? c.noise_dt : 5e-3 / std::max(np.gamma, w_max);
  const double t_max = c.t_max_gamma / np.gamma;

  struct Row {
    double omega;
    bool split;
    std::vector<double> peaks;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < c.omegas.size(); ++i) {
    say(progress, "noisy spectrum " + std::to_string(i + 1) + "/" + std::to_string(c.omegas.size()));
    np.omega_big = c.omegas[i];
    const auto det = spectrum_split_detect(np, noise, t_max, threads);
    out.write_csv(indexed("spectrum_W", i), [&](std::ostream& o) { write_spectrum_csv(o, det.spectrum); });
    maybe_svg(c, out, indexed("spectrum_W", i, "svg"),
              {"a2 power spectrum", "omega - omega0", "PSD", true},
              {{"psd_a2",
                [&] {
                  auto x = det.spectrum.freq;
                  for (double& f : x) f -= np.omega0;
                  return x;
                }(),
                det.spectrum.psd_a2}});
    rows.push_back({c.omegas[i], det.split, det.peak_freqs});
  }
  out.write_csv("noise_split.csv", [&](std::ostream& o) {
    csv::header(o, "omega,split,peak_lo,peak_hi");
    for (const auto& r : rows)
      csv::row(o, {r.omega, r.split ? 1.0 : 0.0, r.peaks.empty() ? nan : r.peaks.front(),
                   r.peaks.size() < 2 ? nan : r.peaks.back()});
  });
  nlohmann::json res = nlohmann::json::object();
  res["dt"] = noise.dt;
  res["t_max"] = t_max;
  if (c.threshold) {
    say(progress, "noisy split bisection");
    np.omega_big = 0.0;
    const double detected = find_noisy_split_threshold(np, noise, t_max, lo, hi, 0.01 * s, threads);
    const double formula = noisy_split_threshold(np.gamma, 0.0, c.temperature, 0.0);
    nlohmann::json report{
        {"inputs",
         {{"gamma", np.gamma},
          {"temperature", c.temperature},
          {"realizations", c.realizations},
          {"t_max", t_max},
          {"dt", noise.dt},
          {"seed", c.seed},
          {"bracket", {lo, hi}}}},
        {"detected_omega_split", detected},
        {"formula_omega_split", formula},
        {"relative_deviation", (detected - formula) / formula}};
    out.write_json("noise_threshold.json", report);
    res["threshold"] = report;
  }
  return res;
}

nlohmann::json run_estimator(const RunConfig& c, RunOutput& out, unsigned threads,
                             const Progress& progress) {
  const double t_max = c.t_max_tr * c.params.t_return();
  std::vector<EstimatorPoint> pts(c.omegas.size());
  say(progress, "estimator over " + std::to_string(c.omegas.size()) + " couplings");
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    const SystemParams q = with_omega(c.params, c.omegas[i]);
    pts[i] = estimator_point(diagonalize(build_matrix(q)), t_max);
    pts[i].omega = c.omegas[i];
    if (c.full_ratio) pts[i].ratio_full = ensemble_ratio(q, c.ensemble, t_max, c.seed, 1).mean;
  });
  out.write_csv("estimator.csv", [&](std::ostream& o) { write_estimator_csv(o, pts); });

  auto column = [&](double EstimatorPoint::*m) {
    std::vector<double> v;
    for (const auto& p : pts) v.push_back(p.*m);
    return v;
  };
  const auto x = in_sse(c.omegas, c.params);
  if (c.svg) {
    std::vector<Series> s{{"full", x, column(&EstimatorPoint::ratio_full)},
                          {"no cross", x, column(&EstimatorPoint::ratio_no_cross)},
                          {"no xi", x, column(&EstimatorPoint::ratio_no_xi)},
                          {"static", x, column(&EstimatorPoint::ratio_static)},
                          {"peak", x, column(&EstimatorPoint::ratio_peak)}};
    maybe_svg(c, out, "estimator.svg", {"estimator chain", "Omega / Omega_SSE", "ratio", false}, s);
  }
  nlohmann::json res = nlohmann::json::object();
  if (pts.size() >= 3 && c.params.omega_sse() > 0.0) {
    res["spike_no_cross"] = slope_spike_ratio(x, column(&EstimatorPoint::ratio_no_cross), 1.0, 0.5);
    res["spike_static"] = slope_spike_ratio(x, column(&EstimatorPoint::ratio_static), 1.0, 0.5);
  }
  return res;
}

}  // namespace

nlohmann::json run(const RunConfig& c, RunOutput& out, unsigned threads, const Progress& progress) {
  c.validate();
  nlohmann::json res = nlohmann::json::object();
  switch (c.command) {
    case Command::eigenprofile:
      res = run_eigenprofile(c, out, progress);
      break;
    case Command::ratio_sweep:
      res = run_ratio_sweep(c, out, threads, progress);
      break;
    case Command::scaling_study:
      res = run_scaling_study(c, out, threads, progress);
      break;
    case Command::nh_compare:
      res = run_nh_compare(c, out, threads, progress);
      break;
    case Command::noise_spectrum:
      res = run_noise_spectrum(c, out, threads, progress);
      break;
    case Command::estimator:
      res = run_estimator(c, out, threads, progress);
      break;
  }
  out.finish(res);
  return res;
}

}  // namespace sse::cli
