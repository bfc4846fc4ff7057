#ifndef DSD_GNN_HPP
#define DSD_GNN_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsd/matrix.hpp"
#include "dsd/observation.hpp"
#include "dsd/topology.hpp"

namespace dsd {

enum class LayerKind { GCN, GraphSAGE, GAT };

const char* layer_kind_name(LayerKind k);
LayerKind layer_kind_from_name(const std::string& name);

struct GnnConfig {
    LayerKind kind = LayerKind::GCN;
    int d_in = kFeatureDim;
    int d_h = 32;
    double dropout_p = 0.5;
};

// Two GNN layers (ReLU + dropout after each), then per-node softmax over the
// embedding dimensions, mean over nodes, and a fully connected head with two
// outputs. Class 0 = AttackPresent (negative), class 1 = NoAttackAllHavePay
// (positive).
struct ModelParams {
    GnnConfig cfg;
    std::vector<Mat> blocks; // order fixed by block_names(cfg)

    static std::vector<std::string> block_names(const GnnConfig& cfg);
    Mat& block(const std::string& name);
    const Mat& block(const std::string& name) const;
};

// Glorot-uniform weights, zero biases.
ModelParams init_params(const GnnConfig& cfg, std::uint64_t seed);
ModelParams zeros_like(const ModelParams& p);
bool all_finite(const ModelParams& p);

// Symmetric-normalized adjacency with self-loops, CSR layout:
// entry (u,v) = 1/sqrt((deg u + 1)(deg v + 1)).
struct NormAdj {
    int n = 0;
    std::vector<int> offsets; // n+1
    std::vector<int> cols;
    std::vector<double> vals;
};

NormAdj normalize_adjacency(const Topology& t);
Mat spmm(const NormAdj& A, const Mat& X); // A * X

// Single-layer forwards, exposed for unit tests; all apply ReLU.
Mat gcn_forward(const NormAdj& A, const Mat& X, const Mat& W);
Mat sage_forward(const Topology& t, const Mat& X, const Mat& W_self, const Mat& W_neigh);
// Single head, LeakyReLU slope 0.2, self-loop included in each neighborhood.
// When `attention` is non-null it receives, per node, the weights over
// N(v) followed by the self-loop weight (adjacency order).
Mat gat_forward(const Topology& t, const Mat& X, const Mat& W, const Mat& a,
                std::vector<std::vector<double>>* attention = nullptr);

// Per-node softmax over embedding dims, mean over nodes, dense head.
// head_w is d_h x 2, head_b is 1 x 2. Throws on an empty H.
std::array<double, 2> readout_classify(const Mat& H, const Mat& head_w, const Mat& head_b,
                                       std::vector<double>* pooled = nullptr);

// Inverted dropout in place. Identity when !training or p == 0; the recorded
// mask (0/1 per element) lets the backward pass replay it.
void apply_dropout(Mat& H, double p, std::uint64_t seed, bool training,
                   std::vector<std::uint8_t>* mask = nullptr);

// Softmax cross-entropy with log-sum-exp stabilization; label in {0,1}.
double cross_entropy(const std::array<double, 2>& logits, int label);

struct EvalResult {
    std::array<double, 2> logits{};
    double loss = 0.0;
};

// Full forward pass; when grads != nullptr also runs the exact reverse-mode
// backward and writes d(loss)/d(block) into the same block layout.
EvalResult model_eval(const ModelParams& p, const Topology& t, const Mat& X, int label,
                      std::uint64_t dropout_seed, bool training, ModelParams* grads);

std::array<double, 2> predict_logits(const ModelParams& p, const Topology& t, const Mat& X);

// Max relative discrepancy between analytic and central finite-difference
// gradients over >= 50 sampled coordinates per block (dropout off).
double grad_check(const ModelParams& p, const Topology& t, const Mat& X, int label,
                  double h, std::uint64_t seed);

struct AdamState {
    double lr = 0.01, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long t = 0;
    std::vector<Mat> m, v; // shaped like the param blocks
};

AdamState make_adam_state(const ModelParams& p, double lr = 0.01, double beta1 = 0.9,
                          double beta2 = 0.999, double eps = 1e-8);
void adam_step(ModelParams& p, const ModelParams& grads, AdamState& s);

// Versioned text checkpoint; weights in hexfloat so round-trips are exact.
void save_model(std::ostream& os, const ModelParams& p);
ModelParams load_model(std::istream& is);

} // namespace dsd

#endif
