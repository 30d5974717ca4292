// Copyright (c) 2026, The traject Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "traject/traject.hpp"

namespace traject::cli {
namespace {

namespace fs = std::filesystem;
using report::json;

struct RunConfig {
  std::vector<std::string> inputs;
  std::string out_dir = ".";

  // band
  double alpha = 0.5;
  std::size_t window = 5;
  std::size_t polyorder = 2;
  std::size_t bins = 64;
  std::string threshold_on = "smoothed";
  std::string band_override;

  // multiscale / rank
  std::string targets = "3..L";
  std::optional<std::size_t> hist_target;
  double beta = 0.5;
  std::string vel_source = "mean";

  // select
  std::string strategy = "geometry_selected";
  std::optional<std::size_t> k;
  int base_rank = 32;
  int lora_alpha = 64;
  std::optional<std::uint64_t> seed;
  bool unrestricted = false;
  bool include_endpoints = false;

  // simplify / plot
  std::optional<double> epsilon;
  std::optional<std::size_t> target;
  int sample = -1;
  std::size_t dims = 2;
};

std::size_t parse_size(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  require(ec == std::errc() && ptr == end, ErrorKind::usage, "invalid " + what + " '" + text + "'");
  return v;
}

/// "3..L", "a..b" (b may be L) or "3,4,6".
std::vector<std::size_t> parse_targets(const std::string& text, std::size_t num_layers) {
  std::vector<std::size_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo_text = text.substr(0, dots);
    const auto hi_text = text.substr(dots + 2);
    const std::size_t lo = parse_size(lo_text, "targets lower bound");
    const std::size_t hi = hi_text == "L" ? num_layers : parse_size(hi_text, "targets upper bound");
    require(lo <= hi, ErrorKind::usage, "empty targets range '" + text + "'");
    for (std::size_t t = lo; t <= hi; ++t) out.push_back(t);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = std::min(text.find(',', pos), text.size());
      const auto item = text.substr(pos, comma - pos);
      out.push_back(item == "L" ? num_layers : parse_size(item, "target"));
      pos = comma + 1;
    }
  }
  return normalize_targets(std::move(out), num_layers);
}

LayerInterval parse_band(const std::string& text, std::size_t num_layers) {
  const auto dots = text.find("..");
  require(dots != std::string::npos, ErrorKind::usage, "band must be given as LO..HI, got '" + text + "'");
  LayerInterval band{parse_size(text.substr(0, dots), "band start"), parse_size(text.substr(dots + 2), "band end")};
  require(band.lo <= band.hi && band.hi < num_layers, ErrorKind::usage,
          "band " + text + " outside layers 0.." + std::to_string(num_layers - 1));
  return band;
}

TrajectoryEnsemble gather(const std::vector<std::string>& inputs) {
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  return io::load_ensemble(paths);
}

BandParams band_params(const RunConfig& cfg) {
  BandParams p;
  p.alpha = cfg.alpha;
  p.window = cfg.window;
  p.polyorder = cfg.polyorder;
  p.bins = cfg.bins;
  require(cfg.threshold_on == "smoothed" || cfg.threshold_on == "raw", ErrorKind::usage,
          "--threshold-on must be 'raw' or 'smoothed', got '" + cfg.threshold_on + "'");
  p.threshold_on = cfg.threshold_on == "raw" ? ThresholdOn::raw : ThresholdOn::smoothed;
  return p;
}

fs::path output_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

void emit(const RunConfig& cfg, const std::string& name, const std::string& text, std::ostream& out) {
  const auto path = output_path(cfg, name);
  io::write_text(path, text);
  out << "wrote " << path.string() << "\n";
}

std::size_t default_hist_target(const std::vector<std::size_t>& targets) {
  // The pivot-frequency histogram is usually read at target 6.
  require(!targets.empty(), ErrorKind::usage, "no targets to draw a pivot histogram for");
  if (std::find(targets.begin(), targets.end(), std::size_t{6}) != targets.end()) return 6;
  return targets.front();
}

// ---- subcommands -----------------------------------------------------------

void write_bundle(const RunConfig& cfg, const TrajectoryEnsemble& ens, std::ostream& out) {
  const auto path = output_path(cfg, "bundle.trjb");
  io::save_trajectories(ens.trajectories(), path);
  out << "wrote " << path.string() << " (S=" << ens.size() << " L=" << ens.num_layers() << " D=" << ens.dim()
      << ")\n";
}

void cmd_project(const RunConfig& cfg, std::ostream& out) { write_bundle(cfg, gather(cfg.inputs), out); }

void cmd_simplify(const RunConfig& cfg, std::ostream& out) {
  const auto ens = gather(cfg.inputs);
  require(cfg.sample < static_cast<int>(ens.size()), ErrorKind::usage,
          "--sample " + std::to_string(cfg.sample) + " out of range for " + std::to_string(ens.size()) + " samples");
  const Trajectory traj = cfg.sample >= 0 ? ens[static_cast<std::size_t>(cfg.sample)] : aggregate_mean(ens);

  json j;
  SimplificationResult result;
  if (cfg.target) {
    auto found = epsilon_for_target(traj, *cfg.target);
    result = std::move(found.pivots);
    j = report::to_json(result);
    j["target"] = *cfg.target;
  } else {
    require(cfg.epsilon.has_value(), ErrorKind::usage, "simplify needs --epsilon or --target");
    result = rdp(traj, *cfg.epsilon);
    j = report::to_json(result);
  }
  j["num_layers"] = traj.size();
  j["source"] = cfg.sample >= 0 ? "sample " + std::to_string(cfg.sample) : std::string("mean");
  emit(cfg, "simplify.json", report::dump(j), out);

  svg::TrajectoryPlotOptions opt;
  opt.title = "Simplified trajectory (PCA projection)";
  opt.pivots = result.kept_indices;
  emit(cfg, "simplify.svg", svg::trajectory_plot(pca_project(traj, 2), opt), out);
}

EnsembleVote run_vote(const RunConfig& cfg, const TrajectoryEnsemble& ens) {
  return ensemble_vote(ens, parse_targets(cfg.targets, ens.num_layers()));
}

void write_multiscale(const RunConfig& cfg, const EnsembleVote& vote, std::ostream& out) {
  emit(cfg, "multiscale.json", report::dump(report::to_json(vote)), out);
  emit(cfg, "multiscale_scores.svg",
       svg::bar_chart(vote.mean_scores, "Multi-scale RDP importance (mean over samples)", "omega"), out);
  const std::size_t t = cfg.hist_target.value_or(default_hist_target(vote.targets));
  const auto it = std::find_if(vote.histograms.begin(), vote.histograms.end(),
                               [t](const PivotHistogram& h) { return h.target == t; });
  require(it != vote.histograms.end(), ErrorKind::usage,
          "--hist-target " + std::to_string(t) + " is not among the analysed targets");
  std::vector<double> counts(it->counts.begin(), it->counts.end());
  emit(cfg, "multiscale_hist.svg",
       svg::bar_chart(counts, "Pivot frequency at target " + std::to_string(t), "samples"), out);
}

void cmd_multiscale(const RunConfig& cfg, std::ostream& out) {
  const auto ens = gather(cfg.inputs);
  write_multiscale(cfg, run_vote(cfg, ens), out);
}

void write_band(const RunConfig& cfg, const BandReport& band, std::ostream& out, std::ostream& err) {
  if (band.degenerate) err << "WARNING:degenerate:hybrid signal is constant; band spans every layer\n";
  emit(cfg, "band.json", report::dump(report::to_json(band)), out);
  emit(cfg, "band.svg", svg::band_plot(band), out);
}

void cmd_band(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto ens = gather(cfg.inputs);
  write_band(cfg, extract_band(aggregate_mean(ens), band_params(cfg)), out, err);
}

std::vector<double> velocity_for_ranking(const RunConfig& cfg, const TrajectoryEnsemble& ens, const Trajectory& mean) {
  if (cfg.vel_source == "mean") return velocity_profile(mean);
  require(cfg.vel_source == "per-sample", ErrorKind::usage,
          "--vel-source must be 'mean' or 'per-sample', got '" + cfg.vel_source + "'");
  std::vector<double> vel(ens.num_layers(), 0.0);
  for (const auto& t : ens) {
    const auto v = velocity_profile(t);
    for (std::size_t l = 0; l < vel.size(); ++l) vel[l] += v[l];
  }
  for (auto& v : vel) v /= static_cast<double>(ens.size());
  return vel;
}

json rank_json(const RunConfig& cfg, const EnsembleVote& vote, const std::vector<double>& vel,
               const ImportanceRanking& ranking) {
  json j = report::to_json(ranking);
  j["vel_source"] = cfg.vel_source;
  j["targets"] = vote.targets;
  j["omega"] = vote.mean_scores;
  j["vel"] = vel;
  std::vector<std::size_t> interior;
  for (auto l : ranking.order)
    if (l != 0 && l + 1 != ranking.order.size()) interior.push_back(l);
  j["interior_order"] = interior;
  return j;
}

void cmd_rank(const RunConfig& cfg, std::ostream& out) {
  const auto ens = gather(cfg.inputs);
  const auto vote = run_vote(cfg, ens);
  const auto vel = velocity_for_ranking(cfg, ens, aggregate_mean(ens));
  const auto ranking = importance_index(vote.mean_scores, vel, cfg.beta);
  emit(cfg, "rank.json", report::dump(rank_json(cfg, vote, vel, ranking)), out);
}

PlanOptions plan_options(const RunConfig& cfg) {
  PlanOptions o;
  o.base_rank = cfg.base_rank;
  o.lora_alpha = cfg.lora_alpha;
  o.seed = cfg.seed;
  o.restrict_to_band = !cfg.unrestricted;
  o.include_endpoints = cfg.include_endpoints;
  return o;
}

void cmd_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Strategy strategy = parse_strategy(cfg.strategy);
  const auto ens = gather(cfg.inputs);
  const auto mean = aggregate_mean(ens);
  const std::size_t L = ens.num_layers();

  const bool needs_ranking = strategy != Strategy::none && strategy != Strategy::full &&
                             strategy != Strategy::random_sparse && strategy != Strategy::reasoning_band;
  const bool needs_band = needs_ranking || strategy == Strategy::reasoning_band ||
                          (strategy == Strategy::random_sparse && !cfg.k);

  LayerInterval band{0, L - 1};
  if (!cfg.band_override.empty()) {
    band = parse_band(cfg.band_override, L);
  } else if (needs_band) {
    const auto report = extract_band(mean, band_params(cfg));
    if (report.degenerate) err << "WARNING:degenerate:hybrid signal is constant; band spans every layer\n";
    band = report.band;
  }

  ImportanceRanking ranking;
  if (needs_ranking) {
    const auto vote = run_vote(cfg, ens);
    ranking = importance_index(vote.mean_scores, velocity_for_ranking(cfg, ens, mean), cfg.beta);
  } else {
    ranking.beta = cfg.beta;
    ranking.index.assign(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) ranking.order.push_back(l);
  }
  const auto plan = build_plan(strategy, ranking, band, cfg.k, plan_options(cfg));
  emit(cfg, "plan.json", report::dump(report::to_json(plan)), out);
}

void write_pca(const RunConfig& cfg, const Trajectory& mean, const LayerInterval* band, std::ostream& out,
               std::ostream& err) {
  require(cfg.dims == 2 || cfg.dims == 3, ErrorKind::usage, "--dims must be 2 or 3");
  const auto pca = pca_project(mean, cfg.dims);
  if (pca.degenerate) err << "WARNING:degenerate:trajectory has no variance; plotting a single point\n";
  svg::TrajectoryPlotOptions opt;
  opt.title = "Mean trajectory (PCA projection, visualization only)";
  opt.band = pca.degenerate ? nullptr : band;
  emit(cfg, "pca.svg", svg::trajectory_plot(pca, opt), out);
}

void cmd_plot_pca(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto ens = gather(cfg.inputs);
  const auto mean = aggregate_mean(ens);
  std::optional<LayerInterval> band;
  if (!cfg.band_override.empty()) {
    band = parse_band(cfg.band_override, mean.size());
  } else if (mean.size() >= cfg.window) {
    band = extract_band(mean, band_params(cfg)).band;
  }
  write_pca(cfg, mean, band ? &*band : nullptr, out, err);
}

void cmd_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto ens = gather(cfg.inputs);
  write_bundle(cfg, ens, out);
  const auto mean = aggregate_mean(ens);

  const auto vote = run_vote(cfg, ens);
  write_multiscale(cfg, vote, out);

  const auto band_report = extract_band(mean, band_params(cfg));
  write_band(cfg, band_report, out, err);
  const LayerInterval band = cfg.band_override.empty() ? band_report.band : parse_band(cfg.band_override, mean.size());

  const auto vel = velocity_for_ranking(cfg, ens, mean);
  const auto ranking = importance_index(vote.mean_scores, vel, cfg.beta);
  emit(cfg, "rank.json", report::dump(rank_json(cfg, vote, vel, ranking)), out);

  const auto plan = build_plan(parse_strategy(cfg.strategy), ranking, band, cfg.k, plan_options(cfg));
  emit(cfg, "plan.json", report::dump(report::to_json(plan)), out);

  write_pca(cfg, mean, &band, out, err);
}

// ---- option wiring -----------------------------------------------------------

void add_inputs(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("inputs", cfg.inputs, "TRJB bundle(s), RACT file(s) or JSONL manifest(s)")->required();
  cmd->add_option("--out,-o", cfg.out_dir, "output directory")->capture_default_str();
}

void add_band_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--alpha", cfg.alpha, "deviation weight in the hybrid signal")->capture_default_str();
  cmd->add_option("--window", cfg.window, "Savitzky-Golay window (odd)")->capture_default_str();
  cmd->add_option("--polyorder", cfg.polyorder, "Savitzky-Golay polynomial order")->capture_default_str();
  cmd->add_option("--bins", cfg.bins, "Otsu histogram bins")->capture_default_str();
  cmd->add_option("--threshold-on", cfg.threshold_on, "threshold the 'smoothed' or 'raw' signal")
      ->capture_default_str();
}

void add_target_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--targets", cfg.targets, "target resolutions: 3..L, a..b or a comma list")->capture_default_str();
}

void add_rank_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--beta", cfg.beta, "RDP-score weight in the importance index")->capture_default_str();
  cmd->add_option("--vel-source", cfg.vel_source, "velocity from the 'mean' trajectory or 'per-sample' average")
      ->capture_default_str();
}

void add_select_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--strategy", cfg.strategy,
                  "none|full|geometry_selected|geometry_weighted|reduced_geometry_weighted|inverse_geometry|"
                  "random_sparse|reasoning_band")
      ->capture_default_str();
  cmd->add_option("--k", cfg.k, "number of top layers (default: half the band)");
  cmd->add_option("--base-rank", cfg.base_rank, "LoRA rank")->capture_default_str();
  cmd->add_option("--lora-alpha", cfg.lora_alpha, "LoRA alpha")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "seed for random_sparse");
  cmd->add_option("--band", cfg.band_override, "use band LO..HI instead of detecting it");
  cmd->add_flag("--unrestricted", cfg.unrestricted, "draw top-K from all layers, not just the band");
  cmd->add_flag("--include-endpoints", cfg.include_endpoints, "allow the first and last layer into top-K");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"traject: layer selection from hidden-state trajectories"};
  app.name("traject");
  app.require_subcommand(1);

  auto* project = app.add_subcommand("project", "project RACT activations into a TRJB trajectory bundle");
  add_inputs(project, cfg);

  auto* simplify = app.add_subcommand("simplify", "RDP-simplify the mean (or one sample) trajectory");
  add_inputs(simplify, cfg);
  auto* eps_opt = simplify->add_option("--epsilon", cfg.epsilon, "distance threshold");
  auto* target_opt = simplify->add_option("--target", cfg.target, "retain at most this many points");
  eps_opt->excludes(target_opt);
  simplify->add_option("--sample", cfg.sample, "sample index (default: mean trajectory)");

  auto* multiscale = app.add_subcommand("multiscale", "multi-scale RDP voting across samples");
  add_inputs(multiscale, cfg);
  add_target_flags(multiscale, cfg);
  multiscale->add_option("--hist-target", cfg.hist_target, "target shown in the pivot histogram (default 6)");

  auto* band = app.add_subcommand("band", "hybrid signal and reasoning-relevant band");
  add_inputs(band, cfg);
  add_band_flags(band, cfg);

  auto* rank = app.add_subcommand("rank", "structural importance ranking");
  add_inputs(rank, cfg);
  add_target_flags(rank, cfg);
  add_rank_flags(rank, cfg);

  auto* select = app.add_subcommand("select", "emit an adaptation plan");
  add_inputs(select, cfg);
  add_band_flags(select, cfg);
  add_target_flags(select, cfg);
  add_rank_flags(select, cfg);
  add_select_flags(select, cfg);

  auto* plot_pca = app.add_subcommand("plot-pca", "PCA plot of the mean trajectory");
  add_inputs(plot_pca, cfg);
  add_band_flags(plot_pca, cfg);
  plot_pca->add_option("--dims", cfg.dims, "2 or 3 principal components")->capture_default_str();
  plot_pca->add_option("--band", cfg.band_override, "highlight band LO..HI instead of detecting it");

  auto* pipeline = app.add_subcommand("pipeline", "project, multiscale, band, rank, select and plot in one go");
  add_inputs(pipeline, cfg);
  add_band_flags(pipeline, cfg);
  add_target_flags(pipeline, cfg);
  add_rank_flags(pipeline, cfg);
  add_select_flags(pipeline, cfg);
  pipeline->add_option("--hist-target", cfg.hist_target, "target shown in the pivot histogram (default 6)");
  pipeline->add_option("--dims", cfg.dims, "2 or 3 principal components for pca.svg")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "ERROR:usage:" << e.what() << "\n";
    return 2;
  }

  try {
    if (*project) cmd_project(cfg, out);
    else if (*simplify) cmd_simplify(cfg, out);
    else if (*multiscale) cmd_multiscale(cfg, out);
    else if (*band) cmd_band(cfg, out, err);
    else if (*rank) cmd_rank(cfg, out);
    else if (*select) cmd_select(cfg, out, err);
    else if (*plot_pca) cmd_plot_pca(cfg, out, err);
    else if (*pipeline) cmd_pipeline(cfg, out, err);
  } catch (const Error& e) {
    err << "ERROR:" << to_string(e.kind()) << ":" << e.what() << "\n";
    return e.kind() == ErrorKind::usage ? 2 : 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "ERROR:io:" << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace traject::cli
