// Copyright 2026 The sigbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigbench/harness.hpp"
#include "sigbench/presets.hpp"

namespace sigbench {

// "mean ± sem", or just the mean when the SEM is undefined.
inline std::string format_summary(const Summary& s, int decimals) {
  if (s.count == 0) return "n/a";
  char buf[64];
  if (s.sem) {
    std::snprintf(buf, sizeof buf, "%.*f ± %.*f", decimals, s.mean, decimals,
                  *s.sem);
  } else {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, s.mean);
  }
  return buf;
}

struct GroupResult {
  RunConfig config;
  Aggregate aggregate;
};

namespace detail {
inline const GroupResult* find_group(std::span<const GroupResult> results,
                                     CellKind cell, LanguageKind lang,
                                     TaskKind task) {
  for (const auto& g : results) {
    if (g.config.cell == cell && g.config.language == lang &&
        g.config.task == task) {
      return &g;
    }
  }
  return nullptr;
}

inline std::string pad(const std::string& s, std::size_t width) {
  // Count code points so "±" does not skew the columns.
  std::size_t len = 0;
  for (unsigned char ch : s) len += (ch & 0xC0) != 0x80;
  return s + std::string(width > len ? width - len : 0, ' ');
}
}  // namespace detail

// Table-1 layout for attval: one block per cell kind, rows = languages,
// columns = tasks; the acquisition block then the final test accuracy
// block. Coordinates: one row per language with final train/test log-MSE.
inline void write_summary_text(std::ostream& os, const ExperimentPreset& preset,
                               std::span<const GroupResult> results) {
  std::vector<CellKind> cells;
  std::vector<LanguageKind> langs;
  std::vector<TaskKind> tasks;
  for (const auto& g : results) {
    auto add = [](auto& v, auto k) {
      if (std::find(v.begin(), v.end(), k) == v.end()) v.push_back(k);
    };
    add(cells, g.config.cell);
    add(langs, g.config.language);
    add(tasks, g.config.task);
  }
  constexpr std::size_t kCol = 22;
  os << "experiment: " << preset.name << '\n';

  if (preset.base.experiment == Experiment::kAttval) {
    struct Block {
      const char* title;
      int decimals;
      Summary Aggregate::*field;
    };
    const Block blocks[] = {
        {"Acquisition speed (epochs to train accuracy >= threshold)", 1,
         &Aggregate::acquisition},
        {"Test accuracy (final epoch, both outputs correct)", 2,
         &Aggregate::final_test_metric},
        {"Test accuracy (final epoch, per output)", 2,
         &Aggregate::final_test_per_output},
    };
    for (const Block& block : blocks) {
      os << '\n' << block.title << '\n';
      for (CellKind cell : cells) {
        os << "  [" << numeric::to_string(cell) << "]\n";
        os << "  " << detail::pad("", 16);
        for (TaskKind t : tasks) {
          os << detail::pad("task-" + std::string(to_string(t)), kCol);
        }
        os << '\n';
        for (LanguageKind l : langs) {
          os << "  " << detail::pad("lang-" + std::string(to_string(l)), 16);
          for (TaskKind t : tasks) {
            const GroupResult* g = detail::find_group(results, cell, l, t);
            std::string text = "-";
            if (g != nullptr) {
              text = format_summary(g->aggregate.*block.field, block.decimals);
              if (block.field == &Aggregate::acquisition &&
                  g->aggregate.not_reached > 0) {
                text += " (" + std::to_string(g->aggregate.not_reached) + " nr)";
              }
            }
            os << detail::pad(text, kCol);
          }
          os << '\n';
        }
      }
    }
    bool any_linear = false;
    for (const auto& g : results) any_linear |= !g.aggregate.linear.empty();
    if (any_linear) {
      os << "\nSampled task-linear parameters\n";
      for (const auto& g : results) {
        for (std::size_t k = 0; k < g.aggregate.linear.size(); ++k) {
          os << "  " << g.aggregate.label << " run " << k << ": "
             << g.aggregate.linear[k].to_string() << '\n';
        }
      }
    }
    os << "\n(nr = runs that never reached the threshold; excluded from the "
          "acquisition mean)\n";
  } else {
    os << '\n' << "Final MSE (mean ± SEM over seeds)\n";
    os << "  " << detail::pad("", 18) << detail::pad("train", kCol)
       << detail::pad("test", kCol) << '\n';
    for (const auto& g : results) {
      os << "  "
         << detail::pad("lang-" + std::string(to_string(g.config.language)), 18)
         << detail::pad(format_summary(g.aggregate.final_train_metric, 6), kCol)
         << detail::pad(format_summary(g.aggregate.final_test_metric, 6), kCol)
         << '\n';
    }
  }
  for (const auto& g : results) {
    if (g.aggregate.failed > 0) {
      os << "warning: " << g.aggregate.failed << " failed run(s) in "
         << g.aggregate.label << '\n';
    }
  }
}

inline nlohmann::json to_json(const Summary& s) {
  nlohmann::json j{{"count", s.count}, {"mean", s.mean}};
  j["sem"] = s.sem ? nlohmann::json(*s.sem) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const LinearTaskParams& p) {
  return {{"A", p.a}, {"b", p.b}};
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"experiment", to_string(c.experiment)},
                   {"language", to_string(c.language)},
                   {"task", to_string(c.task)},
                   {"cell", numeric::to_string(c.cell)},
                   {"n_values", c.n_values},
                   {"epochs", c.epochs},
                   {"batch_size", c.batch_size},
                   {"lr", c.lr},
                   {"embedding", c.embed_dim},
                   {"hidden", c.hidden_dim},
                   {"end_marker", c.end_marker},
                   {"embedding_init", to_string(c.embedding_init)},
                   {"acquisition_threshold", c.acquisition_threshold}};
  if (c.experiment == Experiment::kAttval) {
    j["test_fraction"] = c.test_fraction;
  } else {
    j["n_train"] = c.n_train;
    j["n_test"] = c.n_test;
    j["data_seed"] = c.data_seed;
  }
  if (c.pinned_linear) j["pinned_linear"] = to_json(*c.pinned_linear);
  return j;
}

// Per-run metadata record (the metric series live in the run's CSV).
inline nlohmann::json run_metadata(const RunRecord& r) {
  nlohmann::json j{{"config", to_json(r.config)},
                   {"seed", r.seed},
                   {"epochs_completed", r.epochs.size()},
                   {"failed", r.failed}};
  if (r.failed) j["failure"] = r.failure;
  if (r.linear) j["linear"] = to_json(*r.linear);
  if (r.config.experiment == Experiment::kAttval) {
    j["acquisition_epoch"] = r.acquisition_epoch
                                 ? nlohmann::json(*r.acquisition_epoch)
                                 : nlohmann::json(nullptr);
  }
  if (!r.epochs.empty()) {
    const auto& e = r.final_epoch();
    j["final"] = {{"train_loss", e.train_loss},
                  {"train_metric", e.train_metric},
                  {"test_loss", e.test_loss},
                  {"test_metric", e.test_metric}};
  }
  return j;
}

inline nlohmann::json summary_json(const ExperimentPreset& preset,
                                   std::span<const GroupResult> results) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : results) {
    nlohmann::json linear = nlohmann::json::array();
    for (const auto& p : g.aggregate.linear) linear.push_back(to_json(p));
    groups.push_back({{"label", g.aggregate.label},
                      {"config", to_json(g.config)},
                      {"runs", g.aggregate.runs},
                      {"failed", g.aggregate.failed},
                      {"acquisition", to_json(g.aggregate.acquisition)},
                      {"not_reached", g.aggregate.not_reached},
                      {"final_test_metric", to_json(g.aggregate.final_test_metric)},
                      {"final_train_metric",
                       to_json(g.aggregate.final_train_metric)},
                      {"final_test_per_output",
                       to_json(g.aggregate.final_test_per_output)},
                      {"linear", linear}});
  }
  return {{"experiment", preset.name}, {"groups", groups}};
}

// ---------------------------------------------------------------------------
// Learning curves

struct Curve {
  std::string label;
  std::vector<double> values;  // NaN where no point could be plotted
};

struct CurveSet {
  std::vector<int> epochs;
  std::vector<Curve> curves;
  std::vector<std::string> warnings;
};

// Per language, the mean over runs of log(MSE) at every epoch, for train
// and test. Non-positive MSE values are left out of that epoch's mean.
inline CurveSet mean_log_curves(std::span<const RunRecord> records) {
  CurveSet set;
  std::vector<LanguageKind> langs;
  std::size_t epochs = 0;
  for (const auto& r : records) {
    if (std::find(langs.begin(), langs.end(), r.config.language) == langs.end()) {
      langs.push_back(r.config.language);
    }
    epochs = std::max(epochs, r.epochs.size());
  }
  for (std::size_t e = 0; e < epochs; ++e) set.epochs.push_back(static_cast<int>(e) + 1);

  for (LanguageKind lang : langs) {
    for (const bool train : {true, false}) {
      Curve c;
      c.label = "lang-" + std::string(to_string(lang)) + (train ? " train" : " test");
      c.values.assign(epochs, std::numeric_limits<double>::quiet_NaN());
      for (std::size_t e = 0; e < epochs; ++e) {
        double sum = 0.0;
        int n = 0;
        for (const auto& r : records) {
          if (r.config.language != lang || e >= r.epochs.size()) continue;
          const double mse = train ? r.epochs[e].train_metric : r.epochs[e].test_metric;
          if (!(mse > 0.0)) {
            set.warnings.push_back(c.label + " seed " + std::to_string(r.seed) +
                                   " epoch " + std::to_string(e + 1) +
                                   ": MSE <= 0, point skipped");
            continue;
          }
          sum += std::log(mse);
          ++n;
        }
        if (n > 0) c.values[e] = sum / n;
      }
      set.curves.push_back(std::move(c));
    }
  }
  return set;
}

// Tab-separated: an epoch column then one column per curve.
inline void write_curves(std::ostream& os, const CurveSet& set) {
  os << "epoch";
  for (const auto& c : set.curves) os << '\t' << c.label;
  os << '\n';
  for (std::size_t e = 0; e < set.epochs.size(); ++e) {
    os << set.epochs[e];
    for (const auto& c : set.curves) os << '\t' << format_number(c.values[e]);
    os << '\n';
  }
}

struct SvgOptions {
  int width = 720;
  int height = 440;
  std::string title = "log MSE vs. training epoch";
  std::string x_label = "epoch";
  std::string y_label = "log MSE";
};

namespace detail {
inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline std::string fmt(double v, int decimals = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}
}  // namespace detail

// Line plot as a standalone SVG 1.1 document: axes with ticks, one polyline
// per curve (broken at missing points) and a legend.
inline std::string render_svg(const CurveSet& set, const SvgOptions& opt = {}) {
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#ff7f0e", "#9467bd", "#8c564b"};
  static constexpr const char* kDashes[] = {"", "6,4"};
  const double left = 70, right = 190, top = 40, bottom = 55;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;

  double xmin = set.epochs.empty() ? 0 : set.epochs.front();
  double xmax = set.epochs.empty() ? 1 : set.epochs.back();
  if (xmax <= xmin) xmax = xmin + 1;
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (const auto& c : set.curves) {
    for (double v : c.values) {
      if (std::isfinite(v)) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
  }
  if (!std::isfinite(ymin)) {
    ymin = 0;
    ymax = 1;
  }
  if (ymax - ymin < 1e-9) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
    << opt.width << "\" height=\"" << opt.height << "\" viewBox=\"0 0 "
    << opt.width << ' ' << opt.height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"15\">"
    << detail::svg_escape(opt.title) << "</text>\n";

  // Axes and ticks.
  s << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw
    << "\" y2=\"" << top + ph << "\"/>\n"
    << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
    << "\" y2=\"" << top + ph << "\"/>\n";
  constexpr int kTicks = 5;
  for (int k = 0; k <= kTicks; ++k) {
    const double x = left + pw * k / kTicks;
    const double y = top + ph * k / kTicks;
    s << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x
      << "\" y2=\"" << top + ph + 5 << "\"/>\n"
      << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left
      << "\" y2=\"" << y << "\"/>\n";
  }
  s << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= kTicks; ++k) {
    const double xv = xmin + (xmax - xmin) * k / kTicks;
    const double yv = ymax - (ymax - ymin) * k / kTicks;
    s << "<text x=\"" << left + pw * k / kTicks << "\" y=\"" << top + ph + 18
      << "\" text-anchor=\"middle\">" << detail::fmt(xv, 0) << "</text>\n"
      << "<text x=\"" << left - 8 << "\" y=\"" << top + ph * k / kTicks + 4
      << "\" text-anchor=\"end\">" << detail::fmt(yv) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 12
    << "\" text-anchor=\"middle\">" << detail::svg_escape(opt.x_label)
    << "</text>\n"
    << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 16 " << top + ph / 2 << ")\">"
    << detail::svg_escape(opt.y_label) << "</text>\n</g>\n";

  // Curves.
  for (std::size_t c = 0; c < set.curves.size(); ++c) {
    const auto& curve = set.curves[c];
    const char* color = kColors[(c / 2) % std::size(kColors)];
    const char* dash = kDashes[c % 2];
    std::vector<std::string> segments;
    std::string points;
    for (std::size_t e = 0; e < curve.values.size() && e < set.epochs.size(); ++e) {
      const double v = curve.values[e];
      if (!std::isfinite(v)) {
        if (!points.empty()) segments.push_back(points);
        points.clear();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += detail::fmt(px(set.epochs[e])) + "," + detail::fmt(py(v));
    }
    if (!points.empty()) segments.push_back(points);
    for (const auto& seg : segments) {
      s << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"";
      if (*dash != '\0') s << " stroke-dasharray=\"" << dash << "\"";
      s << " points=\"" << seg << "\"/>\n";
    }
    // Legend entry.
    const double ly = top + 10 + 20.0 * static_cast<double>(c);
    s << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\""
      << left + pw + 45 << "\" y2=\"" << ly << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"";
    if (*dash != '\0') s << " stroke-dasharray=\"" << dash << "\"";
    s << "/>\n<text x=\"" << left + pw + 52 << "\" y=\"" << ly + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << detail::svg_escape(curve.label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace sigbench
