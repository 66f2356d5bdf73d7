#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lid/corpus.hpp"
#include "lid/features.hpp"

namespace lid {

// How a specific-language model turns posteriors into a group decision.
// kSum marginalizes the posterior over group members; kMax routes to the
// group containing the argmax class.
enum class Aggregation { kSum, kMax };

struct LabeledVector {
  FeatureVector features;
  LanguageCode label;
};

// Multinomial naive Bayes with additive smoothing. Log likelihoods are
// stored sparsely: one row per bucket seen in training (dense across
// classes) plus a per-class default for the remaining buckets.
struct NBModel {
  std::vector<LanguageCode> classes;        // first-appearance order
  std::vector<double> log_prior;            // per class, nats
  std::vector<double> unseen_log_likelihood;  // per class, ln(alpha/denom)
  std::unordered_map<std::uint32_t, std::uint32_t> bucket_row;
  std::vector<double> likelihood_rows;      // row-major [rows][classes]
  double alpha = 0.01;
  std::uint32_t num_buckets = 1u << 20;
  FeatureConfig feature_config;

  std::size_t num_rows() const {
    return classes.empty() ? 0 : likelihood_rows.size() / classes.size();
  }
  // Dense per-class likelihood row for a bucket, nullptr if the bucket was
  // never seen in training.
  const double* row(std::uint32_t bucket) const {
    auto it = bucket_row.find(bucket);
    return it == bucket_row.end()
               ? nullptr
               : likelihood_rows.data() +
                     static_cast<std::size_t>(it->second) * classes.size();
  }
  std::optional<std::size_t> class_index(const LanguageCode& lang) const;
};

// log_prior[c]       = ln(docs(c) / N)
// likelihood[c][b]   = ln((count(b,c) + alpha) / (total(c) + alpha * B))
// unseen default [c] = ln(alpha / (total(c) + alpha * B))
// Throws TrainError on an empty sample list or a class whose samples carry
// no features at all.
NBModel train_nb(std::span<const LabeledSample> samples,
                 const FeatureConfig& config, double alpha = 0.01);
NBModel train_nb(std::span<const LabeledVector> samples,
                 const FeatureConfig& config, double alpha = 0.01);

// Unnormalized log joint per class: log_prior + sum count * log_likelihood.
// Aligned with model.classes.
std::vector<double> score(const NBModel& model, const FeatureVector& fv);

// Softmax of score() via max-shifted exponentials; sums to 1.
std::vector<double> posteriors(const NBModel& model, const FeatureVector& fv);
std::vector<double> posteriors_from_scores(std::span<const double> scores);

// Group decision from a specific-language model. Every model class must
// appear in `map`. Ties broken by group order.
const LanguageGroup& predict_group(const NBModel& model, const FeatureVector& fv,
                                   const GroupMap& map, Aggregation aggregation);

// Argmax of score() restricted to group members; ties broken by member
// order. Throws Error when the group shares no class with the model.
LanguageCode predict_within(const NBModel& model, const FeatureVector& fv,
                            const LanguageGroup& group);

// Unrestricted argmax; ties broken by class order.
LanguageCode predict(const NBModel& model, const FeatureVector& fv);

}  // namespace lid
