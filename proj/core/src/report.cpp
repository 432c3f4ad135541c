// Copyright 2026 The SwarmFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "swarmfuzz/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "swarmfuzz/error.hpp"

namespace swarmfuzz::report {
namespace {

using campaign::Variant;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::uint64_t to_u64(const std::string& s, const std::filesystem::path& file) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(file.string() + ": expected an integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ParseError("cannot read " + file.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

struct Stats {
  double mean = 0;
  double std = 0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// Coverage of one trial after `tests` tests, carrying the last value forward.
double coverage_at(const TrialOutcome& t, std::uint64_t tests) {
  double c = 0;
  for (const auto& [x, cov] : t.curve) {
    if (x > tests) break;
    c = static_cast<double>(cov);
  }
  return c;
}

struct VariantGroup {
  Variant variant;
  std::vector<const TrialOutcome*> trials;
};

std::vector<VariantGroup> group(std::span<const TrialOutcome> outcomes) {
  std::vector<VariantGroup> groups;
  for (Variant v : campaign::kAllVariants) {
    VariantGroup g{v, {}};
    for (const TrialOutcome& t : outcomes) {
      if (t.variant == v) g.trials.push_back(&t);
    }
    if (!g.trials.empty()) groups.push_back(std::move(g));
  }
  return groups;
}

struct MeanCurve {
  std::vector<std::uint64_t> tests;
  std::vector<Stats> coverage;
};

MeanCurve mean_curve(const VariantGroup& g) {
  MeanCurve m;
  for (const TrialOutcome* t : g.trials) {
    for (const auto& point : t->curve) m.tests.push_back(point.first);
  }
  std::sort(m.tests.begin(), m.tests.end());
  m.tests.erase(std::unique(m.tests.begin(), m.tests.end()), m.tests.end());
  for (std::uint64_t x : m.tests) {
    std::vector<double> ys;
    for (const TrialOutcome* t : g.trials) ys.push_back(coverage_at(*t, x));
    m.coverage.push_back(stats(ys));
  }
  return m;
}

// First test count at which the mean curve reaches `level`.
std::optional<double> tests_to_reach(const MeanCurve& m, double level) {
  for (std::size_t i = 0; i < m.tests.size(); ++i) {
    if (m.coverage[i].mean >= level - 1e-9) return static_cast<double>(m.tests[i]);
  }
  return std::nullopt;
}

std::string align(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(csv);
  for (std::string line; std::getline(is, line);) rows.push_back(split(line));
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    out += line + '\n';
  }
  return out;
}

}  // namespace

TrialOutcome outcome_of(Variant v, std::size_t trial, const campaign::CampaignResult& r) {
  TrialOutcome t;
  t.variant = v;
  t.trial = trial;
  t.detection = r.first_detection;
  for (const campaign::IterationRecord& rec : r.records) {
    t.curve.emplace_back(rec.tests_total, rec.coverage);
  }
  return t;
}

std::optional<double> median_tests(std::span<const std::optional<std::uint64_t>> values) {
  if (values.empty()) return std::nullopt;
  std::vector<double> xs;
  for (const auto& v : values) xs.push_back(v ? static_cast<double>(*v) : kInf);
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  const double m = n % 2 == 1 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
  if (std::isinf(m)) return std::nullopt;
  return m;
}

std::string speedup_cell(std::optional<double> baseline, std::optional<double> variant) {
  if (!variant) return "N.D.";
  if (!baseline) return "inf";
  return fmt("%.2fx", *baseline / *variant);
}

Tables build_tables(std::span<const TrialOutcome> outcomes) {
  const std::vector<VariantGroup> groups = group(outcomes);
  bool deviations = false;
  for (const VariantGroup& g : groups) deviations = deviations || g.trials.size() > 1;
  const VariantGroup* base = nullptr;
  for (const VariantGroup& g : groups) {
    if (g.variant == Variant::Baseline) base = &g;
  }

  auto bug_median = [](const VariantGroup& g, std::size_t bug) {
    std::vector<std::optional<std::uint64_t>> values;
    for (const TrialOutcome* t : g.trials) values.push_back(t->detection[bug]);
    return median_tests(values);
  };

  Tables out;
  out.detection = "bug,variant,median_tests,speedup,detected\n";
  for (dut::BugId id : dut::kAllBugIds) {
    const std::size_t b = dut::bug_index(id);
    const std::optional<double> base_median =
        base ? bug_median(*base, b) : std::optional<double>();
    for (const VariantGroup& g : groups) {
      const std::optional<double> m = bug_median(g, b);
      std::size_t detected = 0;
      for (const TrialOutcome* t : g.trials) detected += t->detection[b].has_value();
      out.detection += std::string(dut::bug_info(id).name) + ',' +
                       std::string(campaign::variant_name(g.variant)) + ',' +
                       (m ? fmt("%.1f", *m) : "N.D.") + ',' +
                       (base ? speedup_cell(base_median, m) : "n/a") + ',' +
                       std::to_string(detected) + '/' + std::to_string(g.trials.size()) +
                       '\n';
    }
  }

  std::vector<MeanCurve> curves;
  for (const VariantGroup& g : groups) curves.push_back(mean_curve(g));
  const MeanCurve* base_curve = nullptr;
  Stats base_total;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].variant != Variant::Baseline) continue;
    base_curve = &curves[i];
    std::vector<double> finals;
    for (const TrialOutcome* t : groups[i].trials) {
      finals.push_back(static_cast<double>(t->final_coverage()));
    }
    base_total = stats(finals);
  }
  const std::optional<double> base_reach =
      base_curve ? tests_to_reach(*base_curve, base_total.mean) : std::nullopt;

  out.coverage = deviations ? "variant,total_mean,total_std,increment,speedup\n"
                            : "variant,total_mean,increment,speedup\n";
  out.curve = deviations ? "variant,tests,coverage_mean,coverage_std\n"
                         : "variant,tests,coverage_mean\n";
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const VariantGroup& g = groups[i];
    std::vector<double> finals;
    for (const TrialOutcome* t : g.trials) finals.push_back(static_cast<double>(t->final_coverage()));
    const Stats total = stats(finals);
    std::string row = std::string(campaign::variant_name(g.variant)) + ',' +
                      fmt("%.1f", total.mean);
    if (deviations) row += ',' + fmt("%.2f", total.std);
    if (base_curve) {
      row += ',' + fmt("%+.1f", total.mean - base_total.mean);
      row += ',' + speedup_cell(base_reach, tests_to_reach(curves[i], base_total.mean));
    } else {
      row += ",n/a,n/a";
    }
    out.coverage += row + '\n';

    const MeanCurve& m = curves[i];
    for (std::size_t j = 0; j < m.tests.size(); ++j) {
      out.curve += std::string(campaign::variant_name(g.variant)) + ',' +
                   std::to_string(m.tests[j]) + ',' + fmt("%.3f", m.coverage[j].mean);
      if (deviations) out.curve += ',' + fmt("%.3f", m.coverage[j].std);
      out.curve += '\n';
    }
  }
  return out;
}

std::string render(std::span<const TrialOutcome> outcomes) {
  const Tables t = build_tables(outcomes);
  return "Tests to first detection (median over trials)\n" + align(t.detection) +
         "\nTotal coverage (points)\n" + align(t.coverage);
}

std::filesystem::path trial_dir(const std::filesystem::path& dir, Variant v,
                                std::size_t trial) {
  return dir / std::string(campaign::variant_name(v)) / ("trial_" + std::to_string(trial));
}

std::vector<TrialOutcome> load_bench_dir(const std::filesystem::path& dir) {
  std::vector<TrialOutcome> out;
  for (Variant v : campaign::kAllVariants) {
    for (std::size_t j = 0;; ++j) {
      const std::filesystem::path d = trial_dir(dir, v, j);
      if (!std::filesystem::exists(d)) break;
      TrialOutcome t;
      t.variant = v;
      t.trial = j;

      const auto campaign_lines = read_lines(d / "campaign.csv");
      if (campaign_lines.empty() || campaign_lines[0].rfind("iter,tests_total,coverage", 0) != 0) {
        throw ParseError((d / "campaign.csv").string() + ": unexpected header");
      }
      for (std::size_t i = 1; i < campaign_lines.size(); ++i) {
        const auto cells = split(campaign_lines[i]);
        if (cells.size() < 3) throw ParseError((d / "campaign.csv").string() + ": short row");
        t.curve.emplace_back(to_u64(cells[1], d / "campaign.csv"),
                             static_cast<std::size_t>(to_u64(cells[2], d / "campaign.csv")));
      }

      const auto bug_lines = read_lines(d / "bugs.csv");
      for (std::size_t i = 1; i < bug_lines.size(); ++i) {
        const auto cells = split(bug_lines[i]);
        if (cells.size() != 2) throw ParseError((d / "bugs.csv").string() + ": bad row");
        const auto bug = dut::parse_bug(cells[0]);
        if (!bug) throw ParseError((d / "bugs.csv").string() + ": unknown bug " + cells[0]);
        if (cells[1] != "N.D.") {
          t.detection[dut::bug_index(*bug)] = to_u64(cells[1], d / "bugs.csv");
        }
      }
      out.push_back(std::move(t));
    }
  }
  if (out.empty()) throw ParseError("no trial directories under " + dir.string());
  return out;
}

std::vector<TrialOutcome> run_bench(const campaign::CampaignConfig& base,
                                    std::span<const Variant> variants, std::size_t trials) {
  std::vector<TrialOutcome> out;
  for (Variant v : variants) {
    for (std::size_t j = 0; j < trials; ++j) {
      campaign::CampaignConfig cfg = base;
      cfg.variant = v;
      cfg.rng_seed = base.rng_seed + j;
      if (!base.out_dir.empty()) cfg.out_dir = trial_dir(base.out_dir, v, j);
      out.push_back(outcome_of(v, j, campaign::run_campaign(cfg)));
    }
  }
  return out;
}

}  // namespace swarmfuzz::report
