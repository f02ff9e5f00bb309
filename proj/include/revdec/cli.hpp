/* Copyright (C) 2026 revdec authors
 * This program is Licensed under the Apache License, Version 2.0
 * (the "License"); you may not use this file except in compliance
 * with the License. You may obtain a copy of the License at
 *   http://www.apache.org/licenses/LICENSE-2.0
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. See accompanying LICENSE file.
 */
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "revdec/cone_lemma.hpp"
#include "revdec/config.hpp"
#include "revdec/curvature.hpp"
#include "revdec/experiments.hpp"
#include "revdec/manifest_json.hpp"
#include "revdec/norms.hpp"
#include "revdec/partition.hpp"
#include "revdec/structure.hpp"

namespace revdec {
namespace cli {

namespace detail {

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw validation_error("could not parse number '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    out.push_back(text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw capability_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw capability_error("failed writing '" + path + "'");
}

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline int resolve_threads(int flag_threads) {
  if (flag_threads > 0) return flag_threads;
  if (const char* env = std::getenv("REVDEC_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

// Flags the user actually passed override config-file values; everything
// else keeps the file (or built-in) value.
struct ProfileFlags {
  std::string profile, domain, tail, coeffs;
  double minor = 0.0, slope = 0.0, center = 0.0, radius = 0.0;
  int order = 0;

  void attach(CLI::App* sub) {
    sub->add_option("--profile", profile,
                    "profile kind: torus | cone | quasi-torus | "
                    "perturbed-cone | power-series");
    sub->add_option("--domain", domain, "radial domain lo,hi");
    sub->add_option("--minor", minor, "torus minor radius");
    sub->add_option("--slope", slope, "cone slope");
    sub->add_option("--order", order, "vanishing order n");
    sub->add_option("--tail", tail, "higher series coefficients c_{n+1},...");
    sub->add_option("--coeffs", coeffs, "power-series coefficients from c_0");
    sub->add_option("--center", center, "power-series expansion center");
    sub->add_option("--radius", radius, "power-series validity radius");
  }

  void apply(const CLI::App* sub, RunConfig& cfg) const {
    if (sub->count("--profile")) cfg.profile = profile;
    if (sub->count("--minor")) cfg.minor = minor;
    if (sub->count("--slope")) cfg.slope = slope;
    if (sub->count("--order")) cfg.order = order;
    if (sub->count("--tail")) cfg.tail = parse_double_list(tail);
    if (sub->count("--coeffs")) cfg.coeffs = parse_double_list(coeffs);
    if (sub->count("--center")) cfg.center = center;
    if (sub->count("--radius")) cfg.radius = radius;
    if (sub->count("--domain")) {
      auto d = parse_double_list(domain);
      if (d.size() != 2)
        throw validation_error("--domain needs two numbers lo,hi");
      cfg.domain_lo = d[0];
      cfg.domain_hi = d[1];
    }
  }
};

struct CommonFlags {
  std::string config, out_dir, deltas, ps, families;
  double q = 0.0, spacing_factor = 0.0;
  std::uint64_t seed = 0;
  std::size_t voxel_budget = 0;
  int threads = 0, oversample = 0;
  bool shared_grid = false;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config, "flat-key JSON config file");
    sub->add_option("--out-dir", out_dir, "output directory");
    sub->add_option("--delta", deltas, "neighborhood width(s), comma list");
    sub->add_option("--p", ps, "Lebesgue exponent(s), comma list");
    sub->add_option("--q", q, "aggregate exponent: 2 or 4");
    sub->add_option("--family", families,
                    "coefficient families, comma list: constant | "
                    "random-phase | smooth-indicator");
    sub->add_option("--seed", seed, "random-phase seed");
    sub->add_option("--threads", threads,
                    "worker threads (overrides REVDEC_THREADS)");
    sub->add_option("--oversample", oversample, "DFT oversampling factor");
    sub->add_option("--spacing-factor", spacing_factor,
                    "lattice spacing as a fraction of delta");
    sub->add_option("--voxel-budget", voxel_budget, "max DFT grid voxels");
    sub->add_flag("--shared-grid", shared_grid,
                  "evaluate per-box norms on the full grid");
  }

  RunConfig resolve(const CLI::App* sub, const ProfileFlags* prof) const {
    RunConfig cfg;
    if (sub->count("--config")) cfg = load_config(config);
    if (sub->count("--out-dir")) cfg.out_dir = out_dir;
    if (sub->count("--delta")) cfg.deltas = parse_double_list(deltas);
    if (sub->count("--p")) cfg.ps = parse_double_list(ps);
    if (sub->count("--q")) cfg.q = q;
    if (sub->count("--family")) cfg.families = parse_string_list(families);
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--threads")) cfg.threads = threads;
    if (sub->count("--oversample")) cfg.oversample = oversample;
    if (sub->count("--spacing-factor")) cfg.spacing_factor = spacing_factor;
    if (sub->count("--voxel-budget")) cfg.voxel_budget = voxel_budget;
    if (sub->count("--shared-grid")) cfg.shared_grid = shared_grid;
    if (prof) prof->apply(sub, cfg);
    validate_config(cfg);
    return cfg;
  }
};

inline NormOptions norm_options(const RunConfig& cfg) {
  NormOptions opts;
  opts.oversample = cfg.oversample;
  opts.voxel_budget = cfg.voxel_budget;
  opts.shared_grid = cfg.shared_grid;
  opts.threads = resolve_threads(cfg.threads);
  return opts;
}

inline void echo_config(const RunConfig& cfg, const std::string& subcommand) {
  std::filesystem::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/resolved_config.json",
                  resolved_config_json(cfg, subcommand).dump(2) + "\n");
}

inline int run_analyze(const RunConfig& cfg) {
  Profile p = profile_from_config(cfg);
  echo_config(cfg, "analyze");

  std::string csv =
      "r,gamma,dgamma,d2gamma,gauss,lambda_rad,lambda_ang,degeneracy\n";
  const int rows = 513;
  Interval dom = p.domain();
  for (const auto& sample : curvature_profile_samples(p, rows)) {
    Jet j = p.jet(sample.r, 2);
    csv += fmt_g17(sample.r) + "," + fmt_g17(j.d[0]) + "," +
           fmt_g17(j.d[1]) + "," + fmt_g17(j.d[2]) + "," +
           fmt_g17(sample.K) + "," + fmt_g17(sample.lambda_rad) + "," +
           fmt_g17(sample.lambda_ang) + "," +
           fmt_g17(curvature_degeneracy(p, sample.r)) + "\n";
  }
  write_text_file(cfg.out_dir + "/curvature.csv", csv);

  auto zeros = find_curvature_zeros(p);
  auto dec = decompose_interval(p, zeros);
  nlohmann::json j;
  j["profile"] = p.id();
  j["domain"] = {dom.lo, dom.hi};
  j["zeros"] = nlohmann::json::array();
  for (const auto& d : dec.degenerate) {
    nlohmann::json z;
    z["r"] = d.zero.r;
    z["n"] = d.zero.n;
    z["case"] = to_string(d.zero.kind);
    z["half_width"] = d.zero.delta;
    z["a0"] = d.zero.a0;
    z["a1"] = d.zero.a1;
    z["cn"] = d.zero.cn;
    j["zeros"].push_back(z);
  }
  j["pieces"] = nlohmann::json::array();
  for (const auto& piece : dec.ordered_pieces())
    j["pieces"].push_back({piece.lo, piece.hi});
  write_text_file(cfg.out_dir + "/zeros.json", j.dump(2) + "\n");

  std::printf("analyze: %d curvature rows, %zu degenerate pieces\n", rows,
              dec.degenerate.size());
  for (const auto& d : dec.degenerate)
    std::printf("  zero r=%.12g case=%s n=%d half-width=%.12g\n", d.zero.r,
                to_string(d.zero.kind), d.zero.n, d.zero.delta);
  return 0;
}

inline int run_partition(const RunConfig& cfg, const std::string& out_file) {
  if (cfg.deltas.size() != 1)
    throw validation_error("partition takes exactly one delta");
  Profile p = profile_from_config(cfg);
  echo_config(cfg, "partition");
  double delta = cfg.deltas[0];

  PartitionManifest man = build_partition(p, delta);
  std::string path =
      out_file.empty() ? cfg.out_dir + "/manifest.json" : out_file;
  write_text_file(path, manifest_to_json(man).dump(2) + "\n");

  for (const auto& line : man.log) std::printf("  %s\n", line.c_str());
  std::size_t bad = 0;
  double worst_dev = 0.0, worst_c = 0.0;
  for (const auto& b : man.boxes) {
    auto rep = flatness_check(b.frame, p, b.footprint, delta);
    worst_dev = std::max(worst_dev, rep.deviation);
    worst_c = std::max(worst_c, rep.containment);
    if (!rep.pass) ++bad;
  }
  std::printf(
      "partition: %zu boxes -> %s, worst deviation %.3g (budget %.3g), "
      "worst containment %.3g\n",
      man.boxes.size(), path.c_str(), worst_dev, delta, worst_c);
  if (bad > 0) {
    std::fprintf(stderr, "error: %zu boxes fail the flatness gate\n", bad);
    return 1;
  }
  return 0;
}

inline int run_verify(const RunConfig& cfg, const std::string& manifest_path) {
  if (manifest_path.empty())
    throw validation_error("verify needs --manifest");
  Profile p = profile_from_config(cfg);
  echo_config(cfg, "verify");

  std::ifstream in(manifest_path);
  if (!in)
    throw validation_error("cannot open manifest '" + manifest_path + "'");
  nlohmann::json mj;
  try {
    mj = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("manifest parse error: " + std::string(e.what()));
  }
  PartitionManifest man = manifest_from_json(mj);

  // Tiling: radial bands must stripe the domain exactly and each band's
  // arcs must chain around the full circle, sharing bounds bitwise.
  auto index = revdec::detail::BandIndex::build(man);
  bool tiled = !index.bands.empty();
  Interval dom = p.domain();
  if (tiled && index.bands.front().lo != dom.lo) tiled = false;
  if (tiled && index.bands.back().hi != dom.hi) tiled = false;
  for (std::size_t i = 0; tiled && i + 1 < index.bands.size(); ++i)
    if (index.bands[i].hi != index.bands[i + 1].lo) tiled = false;
  for (const auto& band : index.bands) {
    if (!tiled) break;
    for (std::size_t s = 0; s < band.slots.size(); ++s) {
      const auto& fp = man.boxes[band.slots[s].idx].footprint;
      double expect_hi = s + 1 < band.slots.size()
                             ? band.slots[s + 1].lo
                             : kTwoPi;
      if (fp.angular.lo != band.slots[s].lo || fp.angular.hi != expect_hi) {
        tiled = false;
        break;
      }
    }
    if (tiled && (band.slots.empty() || band.slots.front().lo != 0.0))
      tiled = false;
  }

  std::size_t bad = 0;
  double worst_dev = 0.0, worst_c = 0.0;
  for (const auto& b : man.boxes) {
    auto rep = flatness_check(b.frame, p, b.footprint, man.delta);
    worst_dev = std::max(worst_dev, rep.deviation);
    worst_c = std::max(worst_c, rep.containment);
    if (!rep.pass) ++bad;
  }

  std::printf(
      "verify: %zu boxes, tiling %s, flatness %zu/%zu, worst deviation "
      "%.3g (budget %.3g), worst containment %.3g\n",
      man.boxes.size(), tiled ? "exact" : "BROKEN",
      man.boxes.size() - bad, man.boxes.size(), worst_dev, man.delta,
      worst_c);
  return (tiled && bad == 0) ? 0 : 1;
}

inline int run_experiment_cmd(const RunConfig& cfg) {
  echo_config(cfg, "experiment");
  NormOptions opts = norm_options(cfg);

  std::string csv = experiment_csv_header() + "\n";
  for (double delta : cfg.deltas) {
    ExperimentPreset preset = make_preset(cfg.preset, delta);
    for (double p : cfg.ps) {
      for (const auto& fam : cfg.families) {
        ExperimentRecord rec =
            run_experiment(preset, p, cfg.q, family_from_string(fam),
                           cfg.seed, cfg.spacing_factor, opts);
        csv += experiment_csv_row(rec) + "\n";
        std::printf(
            "experiment: %s delta=%.6g p=%g q=%g %s ratio=%.6g (%.2fs)\n",
            rec.surface.c_str(), rec.delta, rec.p, rec.q,
            to_string(rec.family).c_str(), rec.ratio, rec.seconds);
      }
    }
  }
  write_text_file(cfg.out_dir + "/experiments.csv", csv);
  return 0;
}

inline int run_prop5(const RunConfig& cfg) {
  if (cfg.deltas.size() != 1)
    throw validation_error("prop5 takes exactly one delta");
  echo_config(cfg, "prop5");
  NormOptions opts = norm_options(cfg);
  double delta = cfg.deltas[0];

  std::string csv = prop5_csv_header() + "\n";
  for (double p : cfg.ps) {
    for (const auto& fam : cfg.families) {
      std::vector<ExperimentRecord> recs;
      for (int N : cfg.tubes) {
        recs.push_back(prop5_experiment(N, delta, p,
                                        family_from_string(fam), cfg.seed,
                                        opts));
        csv += prop5_csv_row(recs.back()) + "\n";
      }
      if (recs.size() >= 3) {
        FitResult fit = sweep_and_fit(recs, SweepKey::TubeCount);
        std::printf(
            "prop5: p=%g %s slope=%.4f stderr=%.4f (line baseline "
            "1/2-1/p=%.4f)\n",
            p, fam.c_str(), fit.slope, fit.stderr_slope, 0.5 - 1.0 / p);
      }
    }
  }
  write_text_file(cfg.out_dir + "/prop5.csv", csv);
  return 0;
}

inline int run_lemma_check(const RunConfig& cfg) {
  if (cfg.deltas.size() != 1)
    throw validation_error("lemma-check takes exactly one delta");
  Profile p = profile_from_config(cfg);
  echo_config(cfg, "lemma-check");
  double delta = cfg.deltas[0];

  auto zeros = find_curvature_zeros(p);
  auto dec = decompose_interval(p, zeros);
  const ZeroPoint* zp = nullptr;
  for (const auto& d : dec.degenerate)
    if (d.zero.kind != ProfileKind::QuasiTorus) zp = &d.zero;
  if (!zp)
    throw validation_error(
        "lemma-check needs a sloped (cone or perturbed-cone) zero");
  const ZeroPoint& z = *zp;

  std::vector<int> ks;
  if (cfg.k >= 0) {
    ks.push_back(cfg.k);
  } else if (z.kind == ProfileKind::Cone) {
    ks.push_back(0);
  } else {
    for (const auto& a : dyadic_annuli(z.n, delta, z.delta))
      if (a.side > 0) ks.push_back(a.k);
  }

  std::string csv = "k,s,dp,dq,phi_max,psik_max,bound_ratio\n";
  std::string hcsv = "k,s,max_rel_err,min_abs_eig,max_abs_eig\n";
  bool ok = true;
  for (int k : ks) {
    DerivativeTable table =
        lemma_derivative_check(p, z, k, delta, cfg.maxorder);
    for (const auto& e : table.entries)
      csv += std::to_string(k) + "," + fmt_g17(table.s) + "," +
             std::to_string(e.p) + "," + std::to_string(e.q) + "," +
             fmt_g17(e.phi_max) + "," + fmt_g17(e.psik_max) + "," +
             fmt_g17(e.bound_ratio) + "\n";
    HessianReport rep = hessian_identity_check(p, z, k, delta);
    hcsv += std::to_string(k) + "," + fmt_g17(rep.s) + "," +
            fmt_g17(rep.max_rel_err) + "," + fmt_g17(rep.min_abs_eig) + "," +
            fmt_g17(rep.max_abs_eig) + "\n";
    std::printf(
        "lemma-check: k=%d s=%.6g max|phi|=%.3g hessian rel err=%.3g\n", k,
        table.s, table.at(0, 0).phi_max, rep.max_rel_err);
    if (rep.max_rel_err > 1e-4) ok = false;
  }
  write_text_file(cfg.out_dir + "/lemma.csv", csv);
  write_text_file(cfg.out_dir + "/hessian.csv", hcsv);
  if (!ok)
    std::fprintf(stderr,
                 "error: Hessian rescaling identity exceeded 1e-4\n");
  return ok ? 0 : 1;
}

}  // namespace detail

// Entry point shared by the binary and the tests. Exit 0 on success, 1 when
// a computation or gate fails validation, 2 on usage errors.
inline int run(int argc, const char* const* argv) {
  CLI::App app{
      "Essentially-flat partitions and empirical decoupling ratios for "
      "surfaces of revolution"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand(
      "analyze", "curvature profile, degeneracy zeros, interval split");
  detail::ProfileFlags prof_analyze;
  detail::CommonFlags common_analyze;
  prof_analyze.attach(analyze);
  common_analyze.attach(analyze);

  auto* partition = app.add_subcommand(
      "partition", "build the multiscale essentially-flat partition");
  detail::ProfileFlags prof_partition;
  detail::CommonFlags common_partition;
  std::string partition_out;
  prof_partition.attach(partition);
  common_partition.attach(partition);
  partition->add_option("--out", partition_out, "manifest output path");

  auto* verify = app.add_subcommand(
      "verify", "re-check tiling and flatness of a manifest");
  detail::ProfileFlags prof_verify;
  detail::CommonFlags common_verify;
  std::string verify_manifest;
  prof_verify.attach(verify);
  common_verify.attach(verify);
  verify->add_option("--manifest", verify_manifest, "manifest JSON path");

  auto* experiment = app.add_subcommand(
      "experiment", "measure decoupling ratios on a preset partition");
  detail::CommonFlags common_experiment;
  std::string experiment_preset;
  common_experiment.attach(experiment);
  experiment->add_option(
      "--preset", experiment_preset,
      "torus | perturbed-cone | cone-plates | cone-square | torus-inner | "
      "torus-outer");

  auto* prop5 = app.add_subcommand(
      "prop5", "line-baseline ratios over segment tubes");
  detail::CommonFlags common_prop5;
  std::string prop5_tubes;
  common_prop5.attach(prop5);
  prop5->add_option("--N", prop5_tubes, "tube counts, comma list");

  auto* lemma = app.add_subcommand(
      "lemma-check", "sheared-height derivative and Hessian checks");
  detail::ProfileFlags prof_lemma;
  detail::CommonFlags common_lemma;
  int lemma_k = -1;
  int lemma_maxorder = 3;
  prof_lemma.attach(lemma);
  common_lemma.attach(lemma);
  lemma->add_option("--k", lemma_k, "single dyadic scale index");
  lemma->add_option("--maxorder", lemma_maxorder,
                    "highest derivative order (<= 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) {
      RunConfig cfg = common_analyze.resolve(analyze, &prof_analyze);
      return detail::run_analyze(cfg);
    }
    if (partition->parsed()) {
      RunConfig cfg = common_partition.resolve(partition, &prof_partition);
      if (partition->count("--out")) cfg.out_file = partition_out;
      return detail::run_partition(cfg, cfg.out_file);
    }
    if (verify->parsed()) {
      RunConfig cfg = common_verify.resolve(verify, &prof_verify);
      if (verify->count("--manifest")) cfg.manifest_path = verify_manifest;
      return detail::run_verify(cfg, cfg.manifest_path);
    }
    if (experiment->parsed()) {
      RunConfig cfg = common_experiment.resolve(experiment, nullptr);
      if (experiment->count("--preset")) cfg.preset = experiment_preset;
      return detail::run_experiment_cmd(cfg);
    }
    if (prop5->parsed()) {
      RunConfig cfg = common_prop5.resolve(prop5, nullptr);
      if (prop5->count("--N")) {
        cfg.tubes.clear();
        for (double v : detail::parse_double_list(prop5_tubes))
          cfg.tubes.push_back(static_cast<int>(v));
      }
      validate_config(cfg);
      return detail::run_prop5(cfg);
    }
    if (lemma->parsed()) {
      RunConfig cfg = common_lemma.resolve(lemma, &prof_lemma);
      if (lemma->count("--k")) cfg.k = lemma_k;
      if (lemma->count("--maxorder")) cfg.maxorder = lemma_maxorder;
      return detail::run_lemma_check(cfg);
    }
  } catch (const validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const capability_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace cli
}  // namespace revdec
