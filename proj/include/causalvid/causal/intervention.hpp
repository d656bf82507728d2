#pragma once

#include <memory>
#include <vector>

#include "causalvid/confounder/dictionary.hpp"
#include "causalvid/nn/layers.hpp"

namespace cvid {

struct CausalConfig {
  int feature_dim = 16;  // d, per-RoI feature dimension
  int num_classes = 12;  // N
  int hidden_dim = 128;  // h, common-sense feature dimension
  int trunk_depth = 2;
};

// Behavioral contract: deterministic region detections for a frame.
class RoIProvider {
 public:
  virtual ~RoIProvider() = default;
  virtual std::vector<RoI> rois(int frame_index) const = 0;
};

// Fixed per-frame detections, mostly for tests and scripted scenarios.
class ScriptedRoIProvider : public RoIProvider {
 public:
  explicit ScriptedRoIProvider(std::vector<std::vector<RoI>> per_frame)
      : per_frame_(std::move(per_frame)) {}
  std::vector<RoI> rois(int frame_index) const override;

 private:
  std::vector<std::vector<RoI>> per_frame_;
};

struct CommonSenseFeature {
  std::vector<double> vector;  // length h
  int source_frame = -1;
  int event_id = -1;
  bool empty_frame = false;  // no RoIs; vector is zero
};

struct EncodeStats {
  int fresh = 0;
  int cache_hits = 0;
};

struct EventSpan {
  double start = 0.0;
  double end = 0.0;
  int id = 0;
};

// E_z[prior-weighted logits]: returns sum_z prior[z] * logits_per_z[z]. The
// caller applies softmax; this is the expectation the softmax is moved over.
std::vector<double> nwgm_expectation(const Mat& logits_per_z, const std::vector<double>& prior);

// -log(p[true_class]) with p clamped to >= 1e-12 before the log.
double loss_self(const std::vector<double>& p, int true_class);

// L_self + mean(context losses); bare L_self when there are no contexts.
double loss_cs(double l_self, const std::vector<double>& context_losses);

constexpr double kProbClamp = 1e-12;

// Intervention network: trunk maps [x;z] to a hidden vector, the context head
// maps hidden to N logits, the self head maps x directly to N logits.
class InterventionNet {
 public:
  InterventionNet(nn::ParamStore& ps, const CausalConfig& cfg, Rng& rng,
                  const std::string& prefix = "causal");

  const CausalConfig& config() const { return cfg_; }

  // --- pure inference forms --------------------------------------------------
  // P(Y|X) = sum_z softmax(f(x,z)) * cond[z]; cond must sum to 1 within 1e-6.
  std::vector<double> likelihood(const std::vector<double>& x, const ConfounderDictionary& dict,
                                 const std::vector<double>& cond) const;
  // P(Y|do(X)) = softmax(sum_z P(z) f(x,z)), the NWGM linearization.
  std::vector<double> intervene(const std::vector<double>& x,
                                const ConfounderDictionary& dict) const;
  // Exact expectation sum_z P(z) softmax(f(x,z)); retained as the test oracle
  // and for the likelihood-collapse identity.
  std::vector<double> intervene_exact(const std::vector<double>& x,
                                      const ConfounderDictionary& dict) const;
  std::vector<double> self_predict(const std::vector<double>& x) const;
  // Context branch output = intervene() routed through trunk + context head.
  std::vector<double> context_predict(const std::vector<double>& x,
                                      const ConfounderDictionary& dict) const;
  // Prior-weighted trunk hidden vector; the per-RoI common-sense embedding.
  std::vector<double> hidden_feature(const std::vector<double>& x,
                                     const ConfounderDictionary& dict) const;
  // Raw f(x, z) logits, one row per dictionary entry (N x N).
  Mat context_logits_per_z(const std::vector<double>& x, const ConfounderDictionary& dict) const;

  // --- tape forms (training) ---------------------------------------------------
  // x_row: 1xd. Returns N x h trunk hiddens over all [x;z] pairs.
  ad::Value trunk_hidden_t(ad::Tape& t, ad::Value x_row, const ConfounderDictionary& dict) const;
  ad::Value context_logits_t(ad::Tape& t, ad::Value hidden_rows) const;  // NxH -> NxN
  ad::Value intervene_t(ad::Tape& t, ad::Value x_row, const ConfounderDictionary& dict) const;
  ad::Value self_logits_t(ad::Tape& t, ad::Value x_row) const;
  // Prior-weighted hidden (1xh), differentiable; matches hidden_feature().
  ad::Value hidden_feature_t(ad::Tape& t, ad::Value x_row, const ConfounderDictionary& dict) const;

 private:
  CausalConfig cfg_;
  std::vector<nn::Linear> trunk_;
  nn::Linear self_head_;
  nn::Linear context_head_;
};

// One feature per frame inside the event. A frame whose RoI label set equals
// the previous frame's reuses the previous feature; zero-RoI frames get a
// zero vector and the empty flag.
std::vector<CommonSenseFeature> encode_event(const std::vector<double>& frame_times,
                                             const EventSpan& event, const RoIProvider& provider,
                                             const ConfounderDictionary& dict,
                                             const InterventionNet& net,
                                             EncodeStats* stats = nullptr);

struct LabeledFrame {
  int frame_index = 0;
  int event_id = 0;
  std::vector<RoI> rois;
};

struct CsStepConfig {
  nn::AdamConfig adam;
  int borrow_negatives = 2;   // contexts borrowed from other events
  uint64_t seed = 0;          // for borrow sampling
  uint64_t step_counter = 0;  // mixes into the borrow stream
};

// One gradient step on L_cs summed over all RoIs of the batch. The context set
// of a center RoI is every other RoI co-occurring in the same event, plus
// borrowed RoIs from other events (with their own labels). A non-finite loss
// rejects the step with parameters untouched.
double train_step_cs(InterventionNet& net, nn::ParamStore& ps,
                     const std::vector<LabeledFrame>& batch, const ConfounderDictionary& dict,
                     const CsStepConfig& cfg);

// Builds the summed L_cs for a batch on an existing tape (shared by the DVC
// and QA composite losses).
ad::Value cs_batch_loss_t(ad::Tape& t, const InterventionNet& net,
                          const std::vector<LabeledFrame>& batch,
                          const ConfounderDictionary& dict, int borrow_negatives, uint64_t seed,
                          uint64_t step_counter);

}  // namespace cvid
