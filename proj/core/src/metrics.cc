#include "scriptdiar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

namespace scriptdiar {

namespace {

// An elementary stretch of time with constant speaker activity.
struct Stretch {
  double duration = 0.0;
  std::vector<int> reference;
  std::vector<int> hypothesis;
};

struct Indexed {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;

  explicit Indexed(const SpeakerTimeline& timeline) : names(timeline.speakers()) {
    for (std::size_t i = 0; i < names.size(); ++i) ids.emplace(names[i], static_cast<int>(i));
  }
};

enum class Source { kReference, kHypothesis, kCollar };

struct Event {
  double time;
  Source source;
  int id;
  int delta;
};

// Sweeps both timelines and returns every scored stretch with activity.
std::vector<Stretch> sweep(const SpeakerTimeline& reference, const Indexed& ref_ids,
                           const SpeakerTimeline& hypothesis, const Indexed& hyp_ids, double collar) {
  if (!(collar >= 0.0)) throw InputError("collar must be non-negative");
  std::vector<Event> events;
  for (const auto& t : reference.turns) {
    if (!(t.interval.end > t.interval.start)) continue;
    const int id = ref_ids.ids.at(t.speaker);
    events.push_back({t.interval.start, Source::kReference, id, +1});
    events.push_back({t.interval.end, Source::kReference, id, -1});
    if (collar > 0.0) {
      for (double b : {t.interval.start, t.interval.end}) {
        events.push_back({b - collar, Source::kCollar, 0, +1});
        events.push_back({b + collar, Source::kCollar, 0, -1});
      }
    }
  }
  for (const auto& t : hypothesis.turns) {
    if (!(t.interval.end > t.interval.start)) continue;
    const int id = hyp_ids.ids.at(t.speaker);
    events.push_back({t.interval.start, Source::kHypothesis, id, +1});
    events.push_back({t.interval.end, Source::kHypothesis, id, -1});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });

  std::vector<int> ref_count(ref_ids.names.size(), 0), hyp_count(hyp_ids.names.size(), 0);
  std::set<int> ref_active, hyp_active;
  int collar_depth = 0;
  std::vector<Stretch> stretches;
  std::size_t e = 0;
  while (e < events.size()) {
    const double now = events[e].time;
    for (; e < events.size() && events[e].time == now; ++e) {
      const Event& ev = events[e];
      switch (ev.source) {
        case Source::kCollar:
          collar_depth += ev.delta;
          break;
        case Source::kReference: {
          int& c = ref_count[static_cast<std::size_t>(ev.id)];
          c += ev.delta;
          if (c > 0) ref_active.insert(ev.id); else ref_active.erase(ev.id);
          break;
        }
        case Source::kHypothesis: {
          int& c = hyp_count[static_cast<std::size_t>(ev.id)];
          c += ev.delta;
          if (c > 0) hyp_active.insert(ev.id); else hyp_active.erase(ev.id);
          break;
        }
      }
    }
    if (e == events.size()) break;
    const double next = events[e].time;
    if (collar_depth > 0 || (ref_active.empty() && hyp_active.empty())) continue;
    stretches.push_back(Stretch{next - now, std::vector<int>(ref_active.begin(), ref_active.end()),
                                std::vector<int>(hyp_active.begin(), hyp_active.end())});
  }
  return stretches;
}

std::vector<std::vector<double>> overlap_from(const std::vector<Stretch>& stretches, std::size_t n_ref,
                                              std::size_t n_hyp) {
  std::vector<std::vector<double>> ov(n_ref, std::vector<double>(n_hyp, 0.0));
  for (const auto& s : stretches) {
    for (int r : s.reference) {
      for (int h : s.hypothesis) ov[static_cast<std::size_t>(r)][static_cast<std::size_t>(h)] += s.duration;
    }
  }
  return ov;
}

// hyp index -> ref index or -1, maximizing total overlap.
std::vector<int> optimal_mapping(const std::vector<std::vector<double>>& ov, std::size_t n_ref,
                                 std::size_t n_hyp) {
  std::vector<std::vector<double>> cost(n_hyp, std::vector<double>(n_ref, 0.0));
  for (std::size_t h = 0; h < n_hyp; ++h) {
    for (std::size_t r = 0; r < n_ref; ++r) cost[h][r] = -ov[r][h];
  }
  std::vector<int> assign = solve_assignment(cost);
  for (std::size_t h = 0; h < n_hyp; ++h) {
    const int r = assign[h];
    if (r >= 0 && !(ov[static_cast<std::size_t>(r)][h] > 0.0)) assign[h] = -1;
  }
  return assign;
}

}  // namespace

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows == 0 ? 0 : cost[0].size();
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  auto c = [&](std::size_t i, std::size_t j) {  // 1-based, zero padded
    return (i <= rows && j <= cols) ? cost[i - 1][j - 1] : 0.0;
  };

  // Shortest augmenting paths with row/column potentials, O(n^3).
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assign(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] >= 1 && p[j] <= rows && j <= cols) assign[p[j] - 1] = static_cast<int>(j - 1);
  }
  return assign;
}

std::vector<std::vector<double>> overlap_matrix(const SpeakerTimeline& reference,
                                                const SpeakerTimeline& hypothesis, double collar) {
  const Indexed ref_ids(reference), hyp_ids(hypothesis);
  return overlap_from(sweep(reference, ref_ids, hypothesis, hyp_ids, collar), ref_ids.names.size(),
                      hyp_ids.names.size());
}

SpeakerMapping hungarian_map(const SpeakerTimeline& reference, const SpeakerTimeline& hypothesis,
                             double collar) {
  const Indexed ref_ids(reference), hyp_ids(hypothesis);
  const auto ov = overlap_from(sweep(reference, ref_ids, hypothesis, hyp_ids, collar), ref_ids.names.size(),
                               hyp_ids.names.size());
  const auto assign = optimal_mapping(ov, ref_ids.names.size(), hyp_ids.names.size());
  SpeakerMapping mapping;
  for (std::size_t h = 0; h < hyp_ids.names.size(); ++h) {
    mapping[hyp_ids.names[h]] =
        assign[h] >= 0 ? std::optional<std::string>(ref_ids.names[static_cast<std::size_t>(assign[h])])
                       : std::nullopt;
  }
  return mapping;
}

DerBreakdown der(const SpeakerTimeline& reference, const SpeakerTimeline& hypothesis, double collar,
                 const std::optional<SpeakerMapping>& mapping) {
  if (!(reference.total_speech() > 0.0)) throw InputError("reference timeline has no speech");
  const Indexed ref_ids(reference), hyp_ids(hypothesis);
  const auto stretches = sweep(reference, ref_ids, hypothesis, hyp_ids, collar);

  std::vector<int> hyp_to_ref;
  if (mapping) {
    hyp_to_ref.assign(hyp_ids.names.size(), -1);
    for (std::size_t h = 0; h < hyp_ids.names.size(); ++h) {
      const auto it = mapping->find(hyp_ids.names[h]);
      if (it == mapping->end() || !it->second) continue;
      const auto r = ref_ids.ids.find(*it->second);
      if (r != ref_ids.ids.end()) hyp_to_ref[h] = r->second;
    }
  } else {
    hyp_to_ref = optimal_mapping(overlap_from(stretches, ref_ids.names.size(), hyp_ids.names.size()),
                                 ref_ids.names.size(), hyp_ids.names.size());
  }

  DerBreakdown out;
  for (const auto& s : stretches) {
    const auto n_ref = static_cast<double>(s.reference.size());
    const auto n_hyp = static_cast<double>(s.hypothesis.size());
    double correct = 0.0;
    for (int h : s.hypothesis) {
      const int r = hyp_to_ref[static_cast<std::size_t>(h)];
      if (r >= 0 && std::binary_search(s.reference.begin(), s.reference.end(), r)) correct += 1.0;
    }
    out.missed += s.duration * std::max(0.0, n_ref - n_hyp);
    out.false_alarm += s.duration * std::max(0.0, n_hyp - n_ref);
    out.speaker_error += s.duration * (std::min(n_ref, n_hyp) - correct);
    out.total_reference += s.duration * n_ref;
  }
  if (!(out.total_reference > 0.0)) throw InputError("collar leaves no scored reference speech");
  out.der = (out.false_alarm + out.missed + out.speaker_error) / out.total_reference;
  return out;
}

std::vector<double> change_points(const SpeakerTimeline& timeline) {
  struct Edge {
    double time;
    int id;
    int delta;
  };
  const Indexed ids(timeline);
  std::vector<Edge> edges;
  for (const auto& t : timeline.turns) {
    if (!(t.interval.end > t.interval.start)) continue;
    const int id = ids.ids.at(t.speaker);
    edges.push_back({t.interval.start, id, +1});
    edges.push_back({t.interval.end, id, -1});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.time < b.time; });

  std::vector<int> count(ids.names.size(), 0);
  std::set<int> active;
  std::vector<double> points;
  std::size_t e = 0;
  while (e < edges.size()) {
    const double now = edges[e].time;
    const std::set<int> before = active;
    for (; e < edges.size() && edges[e].time == now; ++e) {
      int& c = count[static_cast<std::size_t>(edges[e].id)];
      c += edges[e].delta;
      if (c > 0) active.insert(edges[e].id); else active.erase(edges[e].id);
    }
    if (!before.empty() && !active.empty() && before != active) points.push_back(now);
  }
  return points;
}

ScdScore scd_f1(const SpeakerTimeline& reference, const SpeakerTimeline& hypothesis, double tolerance) {
  if (!(tolerance >= 0.0)) throw InputError("SCD tolerance must be non-negative");
  const auto ref = change_points(reference);
  const auto hyp = change_points(hypothesis);

  // Both lists are sorted and compatibility is an interval condition, so the
  // two-pointer sweep yields a maximum one-to-one matching.
  std::size_t matched = 0, i = 0, j = 0;
  while (i < ref.size() && j < hyp.size()) {
    if (std::abs(ref[i] - hyp[j]) <= tolerance + 1e-12) {
      ++matched;
      ++i;
      ++j;
    } else if (ref[i] < hyp[j]) {
      ++i;
    } else {
      ++j;
    }
  }

  ScdScore out;
  out.tolerance = tolerance;
  out.reference_changes = ref.size();
  out.hypothesis_changes = hyp.size();
  out.matched = matched;
  if (ref.empty() && hyp.empty()) {
    out.precision = 1.0;
    out.recall = 1.0;
    out.f1 = 1.0;
    return out;
  }
  if (!hyp.empty()) out.precision = static_cast<double>(matched) / static_cast<double>(hyp.size());
  if (!ref.empty()) out.recall = static_cast<double>(matched) / static_cast<double>(ref.size());
  if (out.precision && out.recall && *out.precision + *out.recall > 0.0) {
    out.f1 = 2.0 * *out.precision * *out.recall / (*out.precision + *out.recall);
  }
  return out;
}

double corpus_significance(const std::vector<double>& scores_a, const std::vector<double>& scores_b) {
  if (scores_a.size() < 2 || scores_b.size() < 2) {
    throw InputError("significance test needs at least two scores per sample");
  }
  auto mean_var = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / static_cast<double>(xs.size() - 1)};
  };
  const auto [mean_a, var_a] = mean_var(scores_a);
  const auto [mean_b, var_b] = mean_var(scores_b);
  const auto na = static_cast<double>(scores_a.size());
  const auto nb = static_cast<double>(scores_b.size());
  const double dof = na + nb - 2.0;
  const double pooled = ((na - 1.0) * var_a + (nb - 1.0) * var_b) / dof;
  const double se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  if (se == 0.0) return mean_a == mean_b ? 1.0 : 0.0;

  const double t = (mean_a - mean_b) / se;
  const boost::math::students_t dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

}  // namespace scriptdiar
