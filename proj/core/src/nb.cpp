#include "lid/nb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lid/errors.hpp"

namespace lid {

namespace {

struct ClassCounts {
  std::uint64_t docs = 0;
  std::uint64_t total = 0;
  std::unordered_map<std::uint32_t, std::uint64_t> buckets;
};

NBModel finalize(std::vector<LanguageCode> classes,
                 std::vector<ClassCounts> counts, const FeatureConfig& config,
                 double alpha, std::uint64_t num_docs) {
  if (alpha <= 0.0) throw TrainError("alpha must be > 0");

  NBModel model;
  model.classes = std::move(classes);
  model.alpha = alpha;
  model.num_buckets = config.num_buckets;
  model.feature_config = config;

  const std::size_t num_classes = model.classes.size();
  std::vector<double> denom(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c].total == 0)
      throw TrainError("class '" + model.classes[c] +
                       "' has no features in its training samples");
    model.log_prior.push_back(std::log(static_cast<double>(counts[c].docs) /
                                       static_cast<double>(num_docs)));
    denom[c] = static_cast<double>(counts[c].total) +
               alpha * static_cast<double>(config.num_buckets);
    model.unseen_log_likelihood.push_back(std::log(alpha / denom[c]));
  }

  // Rows ordered by bucket index: model bytes are then independent of hash
  // map iteration order.
  std::vector<std::uint32_t> seen;
  for (const ClassCounts& cc : counts)
    for (const auto& [bucket, count] : cc.buckets) seen.push_back(bucket);
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

  model.bucket_row.reserve(seen.size());
  model.likelihood_rows.resize(seen.size() * num_classes);
  for (std::size_t r = 0; r < seen.size(); ++r) {
    model.bucket_row.emplace(seen[r], static_cast<std::uint32_t>(r));
    double* row = model.likelihood_rows.data() + r * num_classes;
    for (std::size_t c = 0; c < num_classes; ++c) {
      auto it = counts[c].buckets.find(seen[r]);
      const double count =
          it == counts[c].buckets.end() ? 0.0 : static_cast<double>(it->second);
      row[c] = std::log((count + alpha) / denom[c]);
    }
  }
  return model;
}

template <typename Sample, typename AddFeatures>
NBModel train_impl(std::span<const Sample> samples, const FeatureConfig& config,
                   double alpha, AddFeatures&& add_features) {
  config.validate();
  if (samples.empty()) throw TrainError("no training samples");

  std::vector<LanguageCode> classes;
  std::unordered_map<std::string_view, std::size_t> index;
  std::vector<ClassCounts> counts;
  for (const Sample& sample : samples) {
    auto [it, inserted] = index.emplace(sample.label, classes.size());
    if (inserted) {
      classes.push_back(sample.label);
      counts.emplace_back();
    }
    ClassCounts& cc = counts[it->second];
    ++cc.docs;
    add_features(sample, cc);
  }
  return finalize(std::move(classes), std::move(counts), config, alpha,
                  samples.size());
}

}  // namespace

std::optional<std::size_t> NBModel::class_index(const LanguageCode& lang) const {
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (classes[c] == lang) return c;
  return std::nullopt;
}

NBModel train_nb(std::span<const LabeledSample> samples,
                 const FeatureConfig& config, double alpha) {
  return train_impl<LabeledSample>(
      samples, config, alpha, [&](const LabeledSample& s, ClassCounts& cc) {
        for (const auto& [bucket, count] : featurize(s.text, config).entries) {
          cc.buckets[bucket] += count;
          cc.total += count;
        }
      });
}

NBModel train_nb(std::span<const LabeledVector> samples,
                 const FeatureConfig& config, double alpha) {
  return train_impl<LabeledVector>(
      samples, config, alpha, [&](const LabeledVector& s, ClassCounts& cc) {
        for (const auto& [bucket, count] : s.features.entries) {
          if (bucket >= config.num_buckets)
            throw TrainError("feature bucket out of range");
          cc.buckets[bucket] += count;
          cc.total += count;
        }
      });
}

std::vector<double> score(const NBModel& model, const FeatureVector& fv) {
  std::vector<double> scores = model.log_prior;
  const std::size_t num_classes = model.classes.size();
  for (const auto& [bucket, count] : fv.entries) {
    const double* row = model.row(bucket);
    const double* values =
        row ? row : model.unseen_log_likelihood.data();
    const double weight = static_cast<double>(count);
    for (std::size_t c = 0; c < num_classes; ++c)
      scores[c] += weight * values[c];
  }
  return scores;
}

std::vector<double> posteriors_from_scores(std::span<const double> scores) {
  const double shift = *std::max_element(scores.begin(), scores.end());
  std::vector<double> post(scores.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    post[c] = std::exp(scores[c] - shift);
    sum += post[c];
  }
  for (double& p : post) p /= sum;
  return post;
}

std::vector<double> posteriors(const NBModel& model, const FeatureVector& fv) {
  return posteriors_from_scores(score(model, fv));
}

const LanguageGroup& predict_group(const NBModel& model, const FeatureVector& fv,
                                   const GroupMap& map, Aggregation aggregation) {
  const std::vector<double> post = posteriors(model, fv);

  if (aggregation == Aggregation::kMax) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < post.size(); ++c)
      if (post[c] > post[best]) best = c;
    return map.group_of(model.classes[best]);
  }

  const LanguageGroup* best_group = nullptr;
  double best_mass = -1.0;
  for (const LanguageGroup& group : map.groups()) {
    double mass = 0.0;
    for (const LanguageCode& lang : group.members)
      if (auto c = model.class_index(lang)) mass += post[*c];
    if (mass > best_mass) {
      best_mass = mass;
      best_group = &group;
    }
  }
  if (!best_group) throw Error("predict_group: empty group map");
  return *best_group;
}

LanguageCode predict_within(const NBModel& model, const FeatureVector& fv,
                            const LanguageGroup& group) {
  const std::vector<double> scores = score(model, fv);
  const LanguageCode* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const LanguageCode& lang : group.members) {
    if (auto c = model.class_index(lang)) {
      if (!best || scores[*c] > best_score) {
        best = &lang;
        best_score = scores[*c];
      }
    }
  }
  if (!best)
    throw Error("predict_within: group '" + group.name +
                "' shares no language with the model");
  return *best;
}

LanguageCode predict(const NBModel& model, const FeatureVector& fv) {
  const std::vector<double> scores = score(model, fv);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return model.classes[best];
}

}  // namespace lid
