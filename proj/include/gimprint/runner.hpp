// Scenario runs: build the initial state from a ScenarioConfig, apply the
// imprint protocol, evolve, and collect every artifact in memory. Writing the
// artifacts to disk is a separate step.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gimprint/analysis.hpp"
#include "gimprint/config.hpp"
#include "gimprint/core.hpp"
#include "gimprint/fields.hpp"
#include "gimprint/propagator.hpp"
#include "gimprint/snapshot.hpp"
#include "gimprint/tripod.hpp"
#include "gimprint/two_level.hpp"

namespace gimprint::runner {

using config::ScenarioConfig;

struct PacketRow {
  double t = 0.0;
  std::string engine;
  std::string source;  // "branch" (per dark branch) or "density" (total density)
  std::size_t index = 0;
  analysis::Packet packet;
};

struct NamedSnapshot {
  std::string name;
  SpinorField field;
  double t = 0.0;
};

struct RunResult {
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<PacketRow> packets;
  std::size_t metrics_components = 0;
  std::vector<propagator::MetricsRow> metrics;
  std::vector<NamedSnapshot> snapshots;
  std::vector<std::pair<std::string, std::vector<propagator::MetricsRow>>> imprint_trails;

  void put(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
  void put(const std::string& key, double value) { put(key, io::format_double(value)); }

  /// Summary value by key; throws if absent.
  const std::string& get(const std::string& key) const {
    for (const auto& [k, v] : summary)
      if (k == key) return v;
    throw std::out_of_range("summary has no key '" + key + "'");
  }
  double number(const std::string& key) const { return io::parse_double(get(key)); }

  const NamedSnapshot& snapshot(const std::string& name) const {
    for (const auto& s : snapshots)
      if (s.name == name) return s;
    throw std::out_of_range("no snapshot named '" + name + "'");
  }
};

/// Label of time t in keys and file names, e.g. "t20" or "t0.5".
inline std::string time_label(double t) { return "t" + io::format_double(t); }

namespace detail {

inline Grid2D grid_from(const ScenarioConfig& c) {
  return Grid2D(c.count("nx"), c.count("nz"), c.number("lx"), c.number("lz"));
}

struct Timeline {
  double t_end = 0.0;
  std::vector<double> snapshots;
  std::vector<double> observe;  // sorted union of snapshot times, metrics grid and t_end
};

inline Timeline timeline_from(const ScenarioConfig& c) {
  Timeline tl;
  tl.t_end = c.number("t_end");
  require(tl.t_end >= 0.0, "t_end must be non-negative");
  tl.snapshots = c.list("snapshots");
  require(std::is_sorted(tl.snapshots.begin(), tl.snapshots.end()), "snapshot times must be sorted");
  for (double t : tl.snapshots) require(t >= 0.0 && t <= tl.t_end, "snapshot times must lie in [0, t_end]");
  const double mdt = c.number("metrics_dt");
  require(mdt > 0.0, "metrics_dt must be positive");
  std::vector<double> obs = tl.snapshots;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * mdt;
    if (t > tl.t_end) break;
    obs.push_back(t);
  }
  obs.push_back(tl.t_end);
  std::sort(obs.begin(), obs.end());
  obs.erase(std::unique(obs.begin(), obs.end()), obs.end());
  tl.observe = std::move(obs);
  return tl;
}

inline bool is_snapshot_time(const Timeline& tl, double t) {
  return std::find(tl.snapshots.begin(), tl.snapshots.end(), t) != tl.snapshots.end();
}

/// Adds amplitude * (n1 + i n2) with standard normal n1, n2 to every sample,
/// then renormalizes. A zero amplitude leaves the field untouched.
inline SpinorField perturb(SpinorField f, const ScenarioConfig& c) {
  const double amp = c.number("noise");
  require(amp >= 0.0, "noise must be non-negative");
  if (amp == 0.0) return f;
  std::mt19937_64 rng(static_cast<std::uint64_t>(c.integer("seed")));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : f.data()) {
    const double re = normal(rng);
    const double im = normal(rng);
    v += amp * cplx(re, im);
  }
  return normalized(std::move(f));
}

inline void put_packets(RunResult& out, double t, const std::string& engine, const std::string& source,
                        const std::vector<analysis::Packet>& packets) {
  for (std::size_t i = 0; i < packets.size(); ++i) out.packets.push_back({t, engine, source, i, packets[i]});
}

// -------------------------------------------------------------------------
// Two-level scenarios

inline RunResult run_chirp(const ScenarioConfig& c) {
  const Grid2D g = grid_from(c);
  const Timeline tl = timeline_from(c);
  const double omega0 = c.number("omega0");
  require(omega0 > 0.0, "omega0 must be positive");
  const two_level::ChirpSweep sweep{c.number("delta1"), c.number("delta2"), c.number("k1"), c.number("k2")};
  require(sweep.delta1 * sweep.delta2 < 0.0, "delta1 and delta2 must lie on opposite sides of resonance");
  const Vec2 k_dir = c.vec2("k_hat");
  require(norm(k_dir) > 0.0, "k_hat must be nonzero");
  const Vec2 k_hat = (1.0 / norm(k_dir)) * k_dir;
  const std::size_t panels = c.count("quadrature_panels");
  require(panels >= 1000, "quadrature_panels must be at least 1000");

  const cplx one[] = {1.0};
  const SpinorField env =
      perturb(make_gaussian(g, c.vec2("center"), c.number("sigma"), c.vec2("carrier"), one), c);
  const SpinorField initial = two_level::chirp_initial_state(sweep, omega0, k_hat, env);
  two_level::ChirpResult fin = two_level::chirp_final_state(sweep, omega0, k_hat, env, panels);

  RunResult out;
  const Observables o0 = observables(initial);
  const Observables o1 = observables(fin.field);
  const double k_r = sweep.k_resonant();
  const double grad = two_level::chirp_phase_gradient(sweep, omega0, panels);
  const double grad_asym = sweep.k2 - k_r;
  out.put("scenario", c.scenario());
  out.put("k_resonant", k_r);
  out.put("initial_population_1", o0.populations[0] / o0.norm);
  out.put("population_2", o1.populations[1] / o1.norm);
  out.put("momentum_shift_x", o1.mean_momentum.x - o0.mean_momentum.x);
  out.put("momentum_shift_z", o1.mean_momentum.z - o0.mean_momentum.z);
  out.put("expected_shift_x", k_r * k_hat.x);
  out.put("expected_shift_z", k_r * k_hat.z);
  out.put("momentum_bin", std::max(g.dkx(), g.dkz()));
  out.put("phase_gradient_quadrature", grad);
  out.put("phase_gradient_asymptotic", grad_asym);
  out.put("phase_gradient_relative_error", std::abs(grad - grad_asym) / std::abs(grad_asym));

  out.snapshots.push_back({"initial", initial, 0.0});
  out.metrics_components = 2;
  for (double t : tl.observe) {
    const SpinorField f = propagator::free_propagate(fin.field, t);
    out.metrics.push_back(propagator::metrics_row(t, f, {}));
    if (is_snapshot_time(tl, t)) out.snapshots.push_back({time_label(t), f, t});
  }
  out.put("final_norm", out.metrics.back().norm);
  return out;
}

inline RunResult run_abelian_rotation(const ScenarioConfig& c) {
  const Grid2D g = grid_from(c);
  const Timeline tl = timeline_from(c);
  const double alpha = c.number("alpha");
  const double k_r = c.number("k_r_l");
  const two_level::TwoLevelParams p{c.number("omega0"), 0.0, two_level::rotated_wavevector(k_r, 0.0), k_r, 0.0};
  two_level::validate(p);
  const cplx one[] = {1.0};
  const Vec2 carrier = c.vec2("carrier");
  const SpinorField env = perturb(make_gaussian(g, c.vec2("center"), c.number("sigma"), carrier, one), c);
  const SpinorField fin = two_level::rotation_final_state(alpha, p, env);
  const auto [k1, k2] = two_level::rotation_branch_wavevectors(alpha, k_r);

  RunResult out;
  out.put("scenario", c.scenario());
  out.put("alpha", alpha);
  out.put("momentum_bin", std::max(g.dkx(), g.dkz()));
  const std::array<Vec2, 2> expected = {k1 + carrier, k2 + carrier};
  std::array<Vec2, 2> start{};
  for (std::size_t comp = 0; comp < 2; ++comp) {
    const std::string tag = "component_" + std::to_string(comp + 1);
    const SpinorField part = extract_component(fin, comp);
    const Observables o = observables(part);
    start[comp] = o.centroid;
    out.put(tag + "_population", o.norm / norm(fin));
    out.put(tag + "_momentum_x", o.mean_momentum.x);
    out.put(tag + "_momentum_z", o.mean_momentum.z);
    out.put(tag + "_expected_x", expected[comp].x);
    out.put(tag + "_expected_z", expected[comp].z);
  }
  out.metrics_components = 2;
  SpinorField last = fin;
  for (double t : tl.observe) {
    const SpinorField f = propagator::free_propagate(fin, t);
    out.metrics.push_back(propagator::metrics_row(t, f, {}));
    if (is_snapshot_time(tl, t)) out.snapshots.push_back({time_label(t), f, t});
    last = f;
  }
  for (std::size_t comp = 0; comp < 2; ++comp) {
    const std::string tag = "component_" + std::to_string(comp + 1);
    const SpinorField part = extract_component(last, comp);
    if (!(norm(part) > 1e-12)) {
      out.put(tag + "_drift", 0.0);
      continue;
    }
    const Vec2 d = g.minimal_image(start[comp], observables(part).centroid);
    out.put(tag + "_drift", norm(d));
  }
  out.put("final_norm", out.metrics.back().norm);
  return out;
}

// -------------------------------------------------------------------------
// Tripod scenarios

struct Imprint {
  propagator::ImprintPath path;
  double t = 0.0;
};

inline std::string imprint_kind_name(const Imprint& im) {
  if (im.path.kind == propagator::ImprintPath::Kind::Rotation) return "rotate";
  return im.path.sign > 0 ? "translate" : "translate-back";
}

/// "none", "t=<time>" or "<time>".
inline std::optional<double> parse_optional_time(const std::string& text) {
  const std::string s = config::trim(text);
  if (s.empty() || s == "none") return std::nullopt;
  return config::parse_number(s.starts_with("t=") ? s.substr(2) : s);
}

inline std::vector<Imprint> imprints_from(const ScenarioConfig& c) {
  using Kind = propagator::ImprintPath::Kind;
  std::vector<Imprint> out;
  const std::string& s = c.scenario();
  if (s == "tripod-translation") {
    const double d = c.number("d_z");
    out.push_back({{Kind::Translation, d, 1}, 0.0});
    if (const auto t2 = parse_optional_time(c.text("second_imprint"))) out.push_back({{Kind::Translation, d, -1}, *t2});
  } else if (s == "tripod-rotation") {
    out.push_back({{Kind::Rotation, c.number("alpha"), 1}, 0.0});
  } else {
    for (const std::string& item : config::split(c.text("imprints"), ';')) {
      if (item.empty()) continue;
      const auto colon = item.find(':');
      const auto at = item.find('@');
      if (colon == std::string::npos || at == std::string::npos || at < colon)
        throw ValidationError("imprints: expected <kind>:<amount>@<time>, got '" + item + "'");
      const std::string kind = config::trim(item.substr(0, colon));
      const double amount = config::parse_number(item.substr(colon + 1, at - colon - 1));
      const double t = config::parse_number(item.substr(at + 1));
      if (kind == "translate")
        out.push_back({{Kind::Translation, amount, 1}, t});
      else if (kind == "translate-back")
        out.push_back({{Kind::Translation, amount, -1}, t});
      else if (kind == "rotate")
        out.push_back({{Kind::Rotation, amount, 1}, t});
      else
        throw ValidationError("imprints: unknown kind '" + kind + "'");
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Imprint& a, const Imprint& b) { return a.t < b.t; });
  return out;
}

/// One engine's dark-representation state: the field right after the latest
/// event, the time of that event and the beam configuration.
struct DarkTrack {
  std::string engine;
  SpinorField seg;
  double t_seg = 0.0;
  tripod::TripodParams params;
};

inline RunResult run_tripod(const ScenarioConfig& c) {
  const Grid2D g = grid_from(c);
  const Timeline tl = timeline_from(c);
  const std::string engine = c.text("engine");
  require(engine == "effective" || engine == "full" || engine == "both",
          "engine must be effective, full or both");
  tripod::TripodParams p0;
  p0.omega0 = c.number("omega0");
  p0.k_r_l = c.number("k_r_l");
  tripod::validate(p0);
  const std::string branch_text = c.text("branch");
  require(branch_text == "+" || branch_text == "-", "branch must be + or -");
  const auto branch = branch_text == "+" ? tripod::Branch::Plus : tripod::Branch::Minus;
  const double k = c.number("k");
  const double phi_k = c.number("phi_k");
  const Vec2 k_vec = tripod::beam_to_lab(p0, {k * std::cos(phi_k), k * std::sin(phi_k)});
  const std::vector<Imprint> imprints = imprints_from(c);
  for (const Imprint& im : imprints) require(im.t >= 0.0 && im.t <= tl.t_end, "imprint times must lie in [0, t_end]");
  const double duration = c.number("imprint_duration");
  const double imprint_dt = c.number("imprint_dt");
  const std::size_t rot_steps = c.count("rotation_steps");
  const double threshold = c.number("packet_threshold");
  require(threshold > 0.0 && threshold < 1.0, "packet_threshold must lie in (0, 1)");
  const bool use_full = engine != "effective";
  if (use_full) {
    require(duration > 0.0 && imprint_dt > 0.0, "imprint_duration and imprint_dt must be positive");
    require(imprint_dt <= 0.1 / p0.omega0 * (1.0 + 1e-12), "imprint_dt must not exceed 0.1/omega0");
  }
  for (const Imprint& im : imprints)
    if (im.path.kind == propagator::ImprintPath::Kind::Rotation) {
      const std::size_t need = tripod::min_rotation_steps(p0, g, im.path.amount);
      if (rot_steps < need)
        throw ValidationError("rotation_steps = " + std::to_string(rot_steps) + " below the resolution minimum " +
                              std::to_string(need));
    }

  const SpinorField c0 = perturb(tripod::dark_packet(branch, k_vec, g, c.vec2("center"), c.number("sigma"), p0), c);
  const std::optional<double> vs = use_full ? std::optional<double>(tripod::vs_shift(p0)) : std::nullopt;

  RunResult out;
  out.put("scenario", c.scenario());
  out.put("engine", engine);
  out.put("kappa", p0.kappa());
  if (vs) out.put("vs_shift", *vs);
  out.snapshots.push_back({"initial", c0, 0.0});

  std::vector<DarkTrack> tracks;
  if (engine != "full") tracks.push_back({"effective", c0, 0.0, p0});
  if (use_full) tracks.push_back({"full", c0, 0.0, p0});
  const std::string primary = engine == "both" ? "effective" : engine;

  auto apply_imprint = [&](DarkTrack& tr, const Imprint& im, std::size_t idx) {
    const SpinorField before = propagator::evolve_dark_exact(tr.seg, tr.params, im.t - tr.t_seg);
    const std::string tag = "imprint_" + std::to_string(idx + 1);
    const bool rot = im.path.kind == propagator::ImprintPath::Kind::Rotation;
    const tripod::ImprintResult ana =
        rot ? tripod::imprint_rotation(before, tr.params, im.path.amount, rot_steps)
            : tripod::imprint_translation(before, tr.params, im.path.amount, im.path.sign);
    if (tr.engine == "effective") {
      tr.seg = ana.c;
      tr.params = ana.params;
    } else {
      const propagator::AdiabaticImprint full = propagator::adiabatic_imprint_full(
          tripod::embed_dark(before, tr.params), im.path, duration, tr.params, imprint_dt, vs);
      tr.seg = tripod::project_dark(full.psi, full.params).c;
      tr.params = full.params;
      out.put(tag + "_leakage", full.leakage);
      out.put(tag + "_fidelity_to_analytic", analysis::fidelity(tr.seg, ana.c));
      out.imprint_trails.emplace_back(tag, full.trail);
    }
    tr.t_seg = im.t;
    if (tr.engine == primary) {
      const analysis::BranchDecomposition d = analysis::branch_decompose(tr.seg, tr.params);
      out.put(tag + "_kind", imprint_kind_name(im));
      out.put(tag + "_amount", im.path.amount);
      out.put(tag + "_time", im.t);
      out.put(tag + "_w_plus", d.w_plus);
      out.put(tag + "_w_minus", d.w_minus);
    }
  };

  out.metrics_components = 2;
  std::size_t next = 0;
  for (double t : tl.observe) {
    const std::size_t first_pending = next;
    std::vector<SpinorField> now;
    for (DarkTrack& tr : tracks) {
      for (std::size_t i = first_pending; i < imprints.size() && imprints[i].t <= t; ++i) apply_imprint(tr, imprints[i], i);
    }
    while (next < imprints.size() && imprints[next].t <= t) ++next;
    for (DarkTrack& tr : tracks) now.push_back(propagator::evolve_dark_exact(tr.seg, tr.params, t - tr.t_seg));

    for (std::size_t i = 0; i < tracks.size(); ++i) {
      const DarkTrack& tr = tracks[i];
      if (tr.engine == primary) out.metrics.push_back(propagator::metrics_row(t, now[i], tr.params));
      if (!is_snapshot_time(tl, t)) continue;
      out.snapshots.push_back({tr.engine + "_" + time_label(t), now[i], t});
      const auto by_branch = analysis::count_branch_packets(now[i], tr.params, threshold);
      put_packets(out, t, tr.engine, "branch", by_branch);
      put_packets(out, t, tr.engine, "density", analysis::count_packets(now[i], threshold, tr.params));
      if (tr.engine == primary) {
        const analysis::BranchDecomposition d = analysis::branch_decompose(now[i], tr.params);
        out.put("packets_" + time_label(t), static_cast<double>(by_branch.size()));
        out.put("w_plus_" + time_label(t), d.w_plus);
        out.put("w_minus_" + time_label(t), d.w_minus);
      }
    }
    if (tracks.size() == 2 && is_snapshot_time(tl, t))
      out.put("fidelity_full_vs_effective_" + time_label(t), analysis::fidelity(now[0], now[1]));
  }
  out.put("final_norm", out.metrics.back().norm);
  return out;
}

}  // namespace detail

/// Runs a scenario entirely in memory.
inline RunResult run(const ScenarioConfig& c) {
  const std::string& s = c.scenario();
  if (s == "chirp") return detail::run_chirp(c);
  if (s == "abelian-rotation") return detail::run_abelian_rotation(c);
  return detail::run_tripod(c);
}

inline void write_summary(std::ostream& os, const RunResult& r) {
  os << "quantity,value\n";
  for (const auto& [k, v] : r.summary) os << k << ',' << v << '\n';
}

inline void write_packets(std::ostream& os, const RunResult& r) {
  os << "t,engine,source,index,centroid_x,centroid_z,weight,core_weight,momentum_x,momentum_z\n";
  for (const PacketRow& p : r.packets) {
    using io::format_double;
    os << format_double(p.t) << ',' << p.engine << ',' << p.source << ',' << p.index << ','
       << format_double(p.packet.centroid.x) << ',' << format_double(p.packet.centroid.z) << ','
       << format_double(p.packet.weight) << ',' << format_double(p.packet.core_weight) << ','
       << format_double(p.packet.momentum.x) << ',' << format_double(p.packet.momentum.z) << '\n';
  }
}

/// Writes run.cfg, summary.csv, packets.csv, metrics.csv, one .snap file per
/// snapshot and one metrics file per full-engine imprint into `dir`.
inline void write_artifacts(const RunResult& r, const ScenarioConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open("run.cfg");
    os << c.emit();
  }
  {
    auto os = open("summary.csv");
    write_summary(os, r);
  }
  {
    auto os = open("packets.csv");
    write_packets(os, r);
  }
  {
    auto os = open("metrics.csv");
    io::write_metrics_header(os, r.metrics_components);
    for (const auto& row : r.metrics) io::write_metrics_row(os, row);
  }
  for (const auto& [tag, trail] : r.imprint_trails) {
    auto os = open(tag + "_metrics.csv");
    io::write_metrics_header(os, 4);
    for (const auto& row : trail) io::write_metrics_row(os, row);
  }
  for (const NamedSnapshot& s : r.snapshots) io::write_snapshot((dir / (s.name + ".snap")).string(), s.field, s.t);
}

}  // namespace gimprint::runner
