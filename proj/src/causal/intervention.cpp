#include "causalvid/causal/intervention.hpp"

#include <cmath>
#include <set>

#include "causalvid/core/kernels.hpp"

namespace cvid {

using namespace ad;

std::vector<RoI> ScriptedRoIProvider::rois(int frame_index) const {
  CVID_CHECK(frame_index >= 0 && frame_index < static_cast<int>(per_frame_.size()),
             "ScriptedRoIProvider: frame " << frame_index << " not scripted");
  return per_frame_[frame_index];
}

std::vector<double> nwgm_expectation(const Mat& logits_per_z, const std::vector<double>& prior) {
  CVID_CHECK(logits_per_z.rows == static_cast<int>(prior.size()),
             "nwgm_expectation: " << logits_per_z.rows << " logit rows vs " << prior.size()
                                  << " prior entries");
  std::vector<double> out(logits_per_z.cols, 0.0);
  for (int z = 0; z < logits_per_z.rows; ++z)
    for (int c = 0; c < logits_per_z.cols; ++c) out[c] += prior[z] * logits_per_z.at(z, c);
  return out;
}

double loss_self(const std::vector<double>& p, int true_class) {
  CVID_CHECK(true_class >= 0 && true_class < static_cast<int>(p.size()),
             "loss_self: class " << true_class << " outside [0," << p.size() << ")");
  return -std::log(std::max(p[true_class], kProbClamp));
}

double loss_cs(double l_self, const std::vector<double>& context_losses) {
  if (context_losses.empty()) return l_self;
  double s = 0.0;
  for (double v : context_losses) s += v;
  return l_self + s / static_cast<double>(context_losses.size());
}

InterventionNet::InterventionNet(nn::ParamStore& ps, const CausalConfig& cfg, Rng& rng,
                                 const std::string& prefix)
    : cfg_(cfg),
      self_head_(ps, prefix + ".self", cfg.feature_dim, cfg.num_classes, rng),
      context_head_(ps, prefix + ".ctx", cfg.hidden_dim, cfg.num_classes, rng) {
  CVID_CHECK(cfg.trunk_depth >= 1, "trunk depth must be >= 1");
  int in = 2 * cfg.feature_dim;
  for (int i = 0; i < cfg.trunk_depth; ++i) {
    trunk_.emplace_back(ps, prefix + ".trunk" + std::to_string(i), in, cfg.hidden_dim, rng);
    in = cfg.hidden_dim;
  }
}

namespace {

Mat softmax_rows(const Mat& logits) { return kernels::row_softmax(logits); }

void check_x(const std::vector<double>& x, int d) {
  CVID_CHECK(static_cast<int>(x.size()) == d, "feature dim " << x.size() << " != " << d);
}

}  // namespace

Value InterventionNet::trunk_hidden_t(Tape& t, Value x_row, const ConfounderDictionary& dict) const {
  CVID_CHECK(dict.dim() == cfg_.feature_dim, "dictionary dim mismatch");
  const int n = dict.num_classes();
  Value xs = repeat_rows(x_row, n);
  Value pairs = concat_cols(xs, t.constant(dict.entries));  // N x 2d
  Value h = pairs;
  for (const auto& layer : trunk_) h = vtanh(layer.fwd(t, h));
  return h;  // N x hidden
}

Value InterventionNet::context_logits_t(Tape& t, Value hidden_rows) const {
  return context_head_.fwd(t, hidden_rows);
}

Value InterventionNet::intervene_t(Tape& t, Value x_row, const ConfounderDictionary& dict) const {
  Value logits = context_logits_t(t, trunk_hidden_t(t, x_row, dict));  // N x N
  Value prior = t.constant(Mat::row(dict.prior));                      // 1 x N
  Value expected = matmul(prior, logits);                              // 1 x N
  return row_softmax(expected);
}

Value InterventionNet::self_logits_t(Tape& t, Value x_row) const {
  return self_head_.fwd(t, x_row);
}

Value InterventionNet::hidden_feature_t(Tape& t, Value x_row,
                                        const ConfounderDictionary& dict) const {
  Value hidden = trunk_hidden_t(t, x_row, dict);           // N x h
  Value prior = t.constant(Mat::row(dict.prior));          // 1 x N
  return matmul(prior, hidden);                            // 1 x h
}

Mat InterventionNet::context_logits_per_z(const std::vector<double>& x,
                                          const ConfounderDictionary& dict) const {
  check_x(x, cfg_.feature_dim);
  Tape t;
  Value logits = context_logits_t(t, trunk_hidden_t(t, t.constant(Mat::row(x)), dict));
  return t.val(logits);
}

std::vector<double> InterventionNet::likelihood(const std::vector<double>& x,
                                                const ConfounderDictionary& dict,
                                                const std::vector<double>& cond) const {
  CVID_CHECK(cond.size() == static_cast<size_t>(dict.num_classes()),
             "likelihood: cond has " << cond.size() << " entries, want " << dict.num_classes());
  double total = 0.0;
  for (double c : cond) {
    CVID_CHECK(c >= 0.0, "likelihood: cond has a negative entry");
    total += c;
  }
  CVID_CHECK(std::fabs(total - 1.0) <= 1e-6,
             "likelihood: cond sums to " << total << ", not 1 within 1e-6");
  Mat per_z = softmax_rows(context_logits_per_z(x, dict));  // N x N
  std::vector<double> out(dict.num_classes(), 0.0);
  for (int z = 0; z < per_z.rows; ++z)
    for (int c = 0; c < per_z.cols; ++c) out[c] += cond[z] * per_z.at(z, c);
  return out;
}

std::vector<double> InterventionNet::intervene(const std::vector<double>& x,
                                               const ConfounderDictionary& dict) const {
  Mat logits = context_logits_per_z(x, dict);
  std::vector<double> expected = nwgm_expectation(logits, dict.prior);
  Mat sm = softmax_rows(Mat::row(expected));
  return sm.a;
}

std::vector<double> InterventionNet::intervene_exact(const std::vector<double>& x,
                                                     const ConfounderDictionary& dict) const {
  Mat per_z = softmax_rows(context_logits_per_z(x, dict));
  std::vector<double> out(dict.num_classes(), 0.0);
  for (int z = 0; z < per_z.rows; ++z)
    for (int c = 0; c < per_z.cols; ++c) out[c] += dict.prior[z] * per_z.at(z, c);
  return out;
}

std::vector<double> InterventionNet::self_predict(const std::vector<double>& x) const {
  check_x(x, cfg_.feature_dim);
  Tape t;
  Value logits = self_logits_t(t, t.constant(Mat::row(x)));
  return kernels::row_softmax(t.val(logits)).a;
}

std::vector<double> InterventionNet::context_predict(const std::vector<double>& x,
                                                     const ConfounderDictionary& dict) const {
  return intervene(x, dict);
}

std::vector<double> InterventionNet::hidden_feature(const std::vector<double>& x,
                                                    const ConfounderDictionary& dict) const {
  check_x(x, cfg_.feature_dim);
  Tape t;
  Value h = hidden_feature_t(t, t.constant(Mat::row(x)), dict);
  return t.val(h).a;
}

std::vector<CommonSenseFeature> encode_event(const std::vector<double>& frame_times,
                                             const EventSpan& event, const RoIProvider& provider,
                                             const ConfounderDictionary& dict,
                                             const InterventionNet& net, EncodeStats* stats) {
  CVID_CHECK(!frame_times.empty(), "encode_event: no frames");
  CVID_CHECK(event.start < event.end, "encode_event: degenerate event span");
  CVID_CHECK(event.start >= 0.0 && event.end <= frame_times.back() + 1e-9,
             "encode_event: event [" << event.start << "," << event.end
                                     << "] outside the video timeline");
  const int h = net.config().hidden_dim;

  std::vector<CommonSenseFeature> out;
  std::set<int> prev_labels;
  bool have_prev = false;
  std::vector<double> cached(h, 0.0);
  bool cached_empty = false;

  for (int f = 0; f < static_cast<int>(frame_times.size()); ++f) {
    const double ts = frame_times[f];
    if (ts < event.start || ts > event.end) continue;
    std::vector<RoI> rois = provider.rois(f);
    std::set<int> labels;
    for (const RoI& r : rois) labels.insert(r.class_id);

    if (have_prev && labels == prev_labels) {
      if (stats) stats->cache_hits += 1;
    } else {
      if (stats) stats->fresh += 1;
      if (rois.empty()) {
        cached.assign(h, 0.0);
        cached_empty = true;
      } else {
        cached.assign(h, 0.0);
        for (const RoI& r : rois) {
          validate_roi(r, net.config().num_classes, net.config().feature_dim);
          std::vector<double> hid = net.hidden_feature(r.feature, dict);
          for (int i = 0; i < h; ++i) cached[i] += hid[i];
        }
        for (double& v : cached) v /= static_cast<double>(rois.size());
        cached_empty = false;
      }
      prev_labels = labels;
      have_prev = true;
    }
    CommonSenseFeature feat;
    feat.vector = cached;
    feat.source_frame = f;
    feat.event_id = event.id;
    feat.empty_frame = cached_empty;
    out.push_back(std::move(feat));
  }
  return out;
}

Value cs_batch_loss_t(Tape& t, const InterventionNet& net, const std::vector<LabeledFrame>& batch,
                      const ConfounderDictionary& dict, int borrow_negatives, uint64_t seed,
                      uint64_t step_counter) {
  CVID_CHECK(!batch.empty(), "cs loss: empty batch");

  // Collect per-event context label pools and a global pool for borrowing.
  struct Center {
    const RoI* roi;
    int event_id;
    size_t flat_index;
  };
  std::vector<Center> centers;
  std::vector<std::vector<int>> event_labels_of_center;  // co-occurring labels
  std::vector<std::pair<int, int>> all_rois;             // (event_id, label)
  for (const auto& fr : batch)
    for (const RoI& r : fr.rois) all_rois.emplace_back(fr.event_id, r.class_id);

  size_t flat = 0;
  for (const auto& fr : batch) {
    for (const RoI& r : fr.rois) {
      validate_roi(r, net.config().num_classes, net.config().feature_dim);
      Center c{&r, fr.event_id, flat};
      std::vector<int> ctx;
      size_t other = 0;
      for (const auto& fr2 : batch)
        for (const RoI& r2 : fr2.rois) {
          if (other != flat && fr2.event_id == fr.event_id) ctx.push_back(r2.class_id);
          ++other;
        }
      centers.push_back(c);
      event_labels_of_center.push_back(std::move(ctx));
      ++flat;
    }
  }

  Value total;
  bool first = true;
  Rng borrow_rng = rng_at(seed, /*stream=*/0xC5C5, step_counter);
  for (size_t ci = 0; ci < centers.size(); ++ci) {
    const Center& c = centers[ci];
    Value x = t.constant(Mat::row(c.roi->feature));

    Value p_self = row_softmax(net.self_logits_t(t, x));
    Value l_self = neg(vlog(clamp_min(pick(p_self, 0, c.roi->class_id), kProbClamp)));

    std::vector<int> ctx_labels = event_labels_of_center[ci];
    for (int b = 0; b < borrow_negatives; ++b) {
      // borrow a region from a different event, keep its own label
      std::vector<const std::pair<int, int>*> foreign;
      for (const auto& pr : all_rois)
        if (pr.first != c.event_id) foreign.push_back(&pr);
      if (foreign.empty()) break;
      ctx_labels.push_back(foreign[borrow_rng.uniform_int(0, static_cast<int>(foreign.size()))]
                               ->second);
    }

    Value l_cs = l_self;
    if (!ctx_labels.empty()) {
      Value p_ctx = net.intervene_t(t, x, dict);  // 1 x N
      Value ctx_sum;
      for (size_t k = 0; k < ctx_labels.size(); ++k) {
        Value term = neg(vlog(clamp_min(pick(p_ctx, 0, ctx_labels[k]), kProbClamp)));
        ctx_sum = (k == 0) ? term : add(ctx_sum, term);
      }
      l_cs = add(l_self, smul(ctx_sum, 1.0 / static_cast<double>(ctx_labels.size())));
    }
    total = first ? l_cs : add(total, l_cs);
    first = false;
  }
  return total;
}

double train_step_cs(InterventionNet& net, nn::ParamStore& ps,
                     const std::vector<LabeledFrame>& batch, const ConfounderDictionary& dict,
                     const CsStepConfig& cfg) {
  CVID_CHECK(!batch.empty(), "train_step_cs: empty batch");
  ps.zero_grads();
  Tape t;
  Value loss =
      cs_batch_loss_t(t, net, batch, dict, cfg.borrow_negatives, cfg.seed, cfg.step_counter);
  const double value = t.val(loss).at(0, 0);
  if (!std::isfinite(value)) {
    ps.zero_grads();
    fail("train_step_cs: non-finite loss; step rejected, parameters untouched");
  }
  t.backward(loss);
  if (!ps.grads_finite()) {
    ps.zero_grads();
    fail("train_step_cs: non-finite gradient; step rejected, parameters untouched");
  }
  nn::adam_step(ps, cfg.adam);
  return value;
}

}  // namespace cvid
