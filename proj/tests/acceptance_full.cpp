// Full-tier acceptance: large-scale trend and non-learnability checks.
// Hours-scale on a single core; build always, run via -DDSD_FULL_TIER=ON
// (or invoke the acceptance_full binary directly).
#include <doctest.h>

#include <cstdio>
#include <vector>

#include "dsd/pipeline.hpp"

using namespace dsd;

namespace {

void report(int criterion, bool pass) {
    std::printf("[criterion %d] %s\n", criterion, pass ? "PASS" : "FAIL");
    std::fflush(stdout);
}

std::vector<GraphSample> full_dataset(int observers, std::uint64_t seed) {
    DatasetSpec spec;
    spec.n = 14000;
    spec.observer_count = observers;
    spec.total_samples = 1000;
    spec.master_seed = seed;
    return build_dataset(spec);
}

struct RunResult {
    double accuracy = 0.0;
    double recall = 0.0;
};

RunResult train_and_eval(const std::vector<GraphSample>& samples, LayerKind kind,
                         std::uint64_t seed) {
    std::vector<const GraphSample*> train, test;
    split_dataset(samples, 0.7, seed, train, test);
    Hyperparams hp;
    TrainResult r = train_model(train, kind, hp, seed);
    EvalMetrics m = evaluate(r.model, test);
    RunResult out;
    out.accuracy = m.accuracy;
    out.recall = m.recall.value_or(0.0);
    std::printf("  full-tier %s seed=%llu: accuracy=%.4f recall=%.4f\n",
                layer_kind_name(kind), static_cast<unsigned long long>(seed),
                out.accuracy, out.recall);
    std::fflush(stdout);
    return out;
}

} // namespace

TEST_CASE("criterion 6: full-scale observer-count trend") {
    double mean_low = 0.0, mean_high = 0.0;
    double best_high = 0.0, min_recall_low = 1.0, min_recall_high = 1.0;
    const std::uint64_t seeds[] = {1, 2, 3};

    // one dataset resident at a time: two of them exceed small-machine RAM
    {
        auto low = full_dataset(150, 6150);
        for (std::uint64_t s : seeds) {
            RunResult a = train_and_eval(low, LayerKind::GCN, s);
            mean_low += a.accuracy / 3.0;
            min_recall_low = std::min(min_recall_low, a.recall);
        }
    }
    {
        auto high = full_dataset(250, 6250);
        for (std::uint64_t s : seeds) {
            RunResult b = train_and_eval(high, LayerKind::GCN, s);
            mean_high += b.accuracy / 3.0;
            best_high = std::max(best_high, b.accuracy);
            min_recall_high = std::min(min_recall_high, b.recall);
        }

        // (b) needs only one layer kind above 0.93; try others if GCN missed.
        if (best_high < 0.93)
            for (LayerKind kind : {LayerKind::GraphSAGE, LayerKind::GAT}) {
                best_high = std::max(best_high, train_and_eval(high, kind, 1).accuracy);
                if (best_high >= 0.93) break;
            }
    }

    const bool trend = mean_high >= mean_low;
    const bool level = best_high >= 0.93;
    const bool recall = min_recall_low >= 0.98 && min_recall_high >= 0.98;
    std::printf("  criterion-6 mean accuracy: k150=%.4f k250=%.4f best250=%.4f "
                "min recall: k150=%.4f k250=%.4f\n",
                mean_low, mean_high, best_high, min_recall_low, min_recall_high);
    report(6, trend && level && recall);
    CHECK(trend);
    CHECK(level);
    CHECK(recall);
}

TEST_CASE("criterion 7: too few observers is not learnable") {
    auto samples = full_dataset(10, 6010);
    std::vector<const GraphSample*> train, test;
    split_dataset(samples, 0.7, 1, train, test);
    Hyperparams hp;
    hp.early_stop_patience = hp.epochs; // run the full standard budget
    TrainResult r = train_model(train, LayerKind::GCN, hp, 1);
    EvalMetrics m = evaluate(r.model, test);
    const double final_loss = r.loss_curve.back();
    std::printf("  criterion-7 accuracy=%.4f final train loss=%.4f\n", m.accuracy,
                final_loss);
    const bool ok = m.accuracy < 0.6 && final_loss > 0.55;
    report(7, ok);
    CHECK(ok);
}
