#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

#include "explab/gridworld/gridworld.hpp"
#include "explab/rng.hpp"

namespace explab::agent {

inline constexpr int kInputSize = gridworld::kObsSize;
inline constexpr int kHiddenSize = 64;
inline constexpr int kNumActions = gridworld::kNumActions;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Independent one-hidden-layer actor and critic (tanh, 64 units each).
struct PolicyParams {
    Matrix actor_w1;   // 64 x 147
    Vector actor_b1;   // 64
    Matrix actor_w2;   // 7 x 64
    Vector actor_b2;   // 7
    Matrix critic_w1;  // 64 x 147
    Vector critic_b1;  // 64
    Matrix critic_w2;  // 1 x 64
    Vector critic_b2;  // 1

    static PolicyParams zeros();

    /// Calls f(std::span<double>, bool is_actor) on every block, actor blocks first.
    template <class F>
    void visit(F&& f) {
        f(std::span<double>(actor_w1.data(), static_cast<std::size_t>(actor_w1.size())), true);
        f(std::span<double>(actor_b1.data(), static_cast<std::size_t>(actor_b1.size())), true);
        f(std::span<double>(actor_w2.data(), static_cast<std::size_t>(actor_w2.size())), true);
        f(std::span<double>(actor_b2.data(), static_cast<std::size_t>(actor_b2.size())), true);
        f(std::span<double>(critic_w1.data(), static_cast<std::size_t>(critic_w1.size())), false);
        f(std::span<double>(critic_b1.data(), static_cast<std::size_t>(critic_b1.size())), false);
        f(std::span<double>(critic_w2.data(), static_cast<std::size_t>(critic_w2.size())), false);
        f(std::span<double>(critic_b2.data(), static_cast<std::size_t>(critic_b2.size())), false);
    }
    template <class F>
    void visit(F&& f) const {
        const_cast<PolicyParams*>(this)->visit([&](std::span<double> s, bool actor) {
            f(std::span<const double>(s.data(), s.size()), actor);
        });
    }

    std::size_t num_scalars() const;
    bool all_finite() const;

    friend bool operator==(const PolicyParams& a, const PolicyParams& b);
};

/// Parameter gradients; `actor`/`critic` say which halves received a loss signal.
struct Gradients {
    PolicyParams d = PolicyParams::zeros();
    bool actor = false;
    bool critic = false;

    Gradients& operator+=(const Gradients& other);
    Gradients& operator*=(double s);
    double squared_norm() const;
};

/// Orthogonal weights (gain sqrt(2) hidden, 0.01 policy head, 1.0 value head), zero biases.
PolicyParams initialize(Rng& rng);

/// Flattens the observation and scales each channel by its largest code (10, 5, 2).
Vector encode_input(const gridworld::Observation& obs);
void encode_input_into(const gridworld::Observation& obs, Eigen::Ref<Vector> out);
/// One column per observation.
Matrix encode_batch(std::span<const gridworld::Observation> obs);

enum class Heads { Both, ActorOnly };

/// Activations kept for the backward pass. Columns are samples.
struct ForwardCache {
    Matrix input;          // 147 x n
    Matrix actor_hidden;   // 64 x n
    Matrix critic_hidden;  // 64 x n (empty for ActorOnly)
    Matrix logits;         // 7 x n
    RowVector values;      // n (empty for ActorOnly)
};

ForwardCache forward(const PolicyParams& params, const Matrix& input, Heads heads = Heads::Both);

/// Exact gradients of L given dL/dlogits (7 x n) and dL/dvalues (n).
/// Pass an empty matrix/vector to skip a head.
Gradients backward(const PolicyParams& params, const ForwardCache& cache, const Matrix& dlogits,
                   const RowVector& dvalues);

Vector softmax(const Vector& logits);
Vector log_softmax(const Vector& logits);
double entropy(const Vector& logits);

struct SampledAction {
    int action = 0;
    double logprob = 0.0;
};

/// Inverse-CDF draw from softmax(logits).
SampledAction sample_action(const Vector& logits, Rng& rng);
int greedy_action(const Vector& logits);

}  // namespace explab::agent
