#include "explab/agent/policy.hpp"

#include <cmath>

#include "explab/errors.hpp"

namespace explab::agent {

PolicyParams PolicyParams::zeros() {
    PolicyParams p;
    p.actor_w1 = Matrix::Zero(kHiddenSize, kInputSize);
    p.actor_b1 = Vector::Zero(kHiddenSize);
    p.actor_w2 = Matrix::Zero(kNumActions, kHiddenSize);
    p.actor_b2 = Vector::Zero(kNumActions);
    p.critic_w1 = Matrix::Zero(kHiddenSize, kInputSize);
    p.critic_b1 = Vector::Zero(kHiddenSize);
    p.critic_w2 = Matrix::Zero(1, kHiddenSize);
    p.critic_b2 = Vector::Zero(1);
    return p;
}

std::size_t PolicyParams::num_scalars() const {
    std::size_t n = 0;
    visit([&](std::span<const double> s, bool) { n += s.size(); });
    return n;
}

bool PolicyParams::all_finite() const {
    bool ok = true;
    visit([&](std::span<const double> s, bool) {
        for (double v : s) ok = ok && std::isfinite(v);
    });
    return ok;
}

bool operator==(const PolicyParams& a, const PolicyParams& b) {
    return a.actor_w1 == b.actor_w1 && a.actor_b1 == b.actor_b1 && a.actor_w2 == b.actor_w2 &&
           a.actor_b2 == b.actor_b2 && a.critic_w1 == b.critic_w1 && a.critic_b1 == b.critic_b1 &&
           a.critic_w2 == b.critic_w2 && a.critic_b2 == b.critic_b2;
}

Gradients& Gradients::operator+=(const Gradients& o) {
    d.actor_w1 += o.d.actor_w1;
    d.actor_b1 += o.d.actor_b1;
    d.actor_w2 += o.d.actor_w2;
    d.actor_b2 += o.d.actor_b2;
    d.critic_w1 += o.d.critic_w1;
    d.critic_b1 += o.d.critic_b1;
    d.critic_w2 += o.d.critic_w2;
    d.critic_b2 += o.d.critic_b2;
    actor = actor || o.actor;
    critic = critic || o.critic;
    return *this;
}

Gradients& Gradients::operator*=(double s) {
    d.visit([s](std::span<double> block, bool) {
        for (double& v : block) v *= s;
    });
    return *this;
}

double Gradients::squared_norm() const {
    double n = 0.0;
    d.visit([&](std::span<const double> block, bool) {
        for (double v : block) n += v * v;
    });
    return n;
}

namespace {

Matrix orthogonal(int rows, int cols, double gain, Rng& rng) {
    const bool transpose = rows < cols;
    const int m = transpose ? cols : rows;
    const int n = transpose ? rows : cols;
    Matrix a(m, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) a(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(m, n);
    const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    Matrix w = transpose ? Matrix(q.transpose()) : q;
    return gain * w;
}

}  // namespace

PolicyParams initialize(Rng& rng) {
    PolicyParams p = PolicyParams::zeros();
    const double hidden_gain = std::sqrt(2.0);
    p.actor_w1 = orthogonal(kHiddenSize, kInputSize, hidden_gain, rng);
    p.actor_w2 = orthogonal(kNumActions, kHiddenSize, 0.01, rng);
    p.critic_w1 = orthogonal(kHiddenSize, kInputSize, hidden_gain, rng);
    p.critic_w2 = orthogonal(1, kHiddenSize, 1.0, rng);
    return p;
}

void encode_input_into(const gridworld::Observation& obs, Eigen::Ref<Vector> out) {
    constexpr double kScale[3] = {1.0 / gridworld::kMaxObjectCode, 1.0 / gridworld::kMaxColorCode,
                                  1.0 / gridworld::kMaxStateCode};
    for (int i = 0; i < kInputSize; ++i) out(i) = obs.tiles[static_cast<std::size_t>(i)] * kScale[i % 3];
}

Vector encode_input(const gridworld::Observation& obs) {
    Vector v(kInputSize);
    encode_input_into(obs, v);
    return v;
}

Matrix encode_batch(std::span<const gridworld::Observation> obs) {
    Matrix x(kInputSize, static_cast<Eigen::Index>(obs.size()));
    for (std::size_t j = 0; j < obs.size(); ++j) encode_input_into(obs[j], x.col(static_cast<Eigen::Index>(j)));
    return x;
}

ForwardCache forward(const PolicyParams& p, const Matrix& input, Heads heads) {
    if (input.rows() != kInputSize) throw UsageError("forward: input must have 147 rows");
    ForwardCache c;
    c.input = input;
    Matrix za = p.actor_w1 * input;
    za.colwise() += p.actor_b1;
    c.actor_hidden = za.array().tanh();
    c.logits = p.actor_w2 * c.actor_hidden;
    c.logits.colwise() += p.actor_b2;
    if (heads == Heads::Both) {
        Matrix zc = p.critic_w1 * input;
        zc.colwise() += p.critic_b1;
        c.critic_hidden = zc.array().tanh();
        c.values = (p.critic_w2 * c.critic_hidden).array() + p.critic_b2(0);
    }
    return c;
}

Gradients backward(const PolicyParams& p, const ForwardCache& c, const Matrix& dlogits, const RowVector& dvalues) {
    Gradients g;
    if (dlogits.size() > 0) {
        g.actor = true;
        g.d.actor_w2.noalias() = dlogits * c.actor_hidden.transpose();
        g.d.actor_b2 = dlogits.rowwise().sum();
        const Matrix dz = ((p.actor_w2.transpose() * dlogits).array() * (1.0 - c.actor_hidden.array().square())).matrix();
        g.d.actor_w1.noalias() = dz * c.input.transpose();
        g.d.actor_b1 = dz.rowwise().sum();
    }
    if (dvalues.size() > 0) {
        if (c.critic_hidden.size() == 0) throw UsageError("backward: critic head was not evaluated");
        g.critic = true;
        g.d.critic_w2.noalias() = dvalues * c.critic_hidden.transpose();
        g.d.critic_b2(0) = dvalues.sum();
        const Matrix dz =
            ((p.critic_w2.transpose() * dvalues).array() * (1.0 - c.critic_hidden.array().square())).matrix();
        g.d.critic_w1.noalias() = dz * c.input.transpose();
        g.d.critic_b1 = dz.rowwise().sum();
    }
    return g;
}

Vector log_softmax(const Vector& logits) {
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    return logits.array() - lse;
}

Vector softmax(const Vector& logits) { return log_softmax(logits).array().exp(); }

double entropy(const Vector& logits) {
    const Vector lp = log_softmax(logits);
    return -(lp.array().exp() * lp.array()).sum();
}

SampledAction sample_action(const Vector& logits, Rng& rng) {
    const Vector lp = log_softmax(logits);
    const double u = rng.uniform();
    double cdf = 0.0;
    int chosen = static_cast<int>(lp.size()) - 1;
    for (int a = 0; a < lp.size(); ++a) {
        cdf += std::exp(lp(a));
        if (u < cdf) {
            chosen = a;
            break;
        }
    }
    // Guard against rounding leaving u past the final cumulative sum on a zero-probability tail.
    while (chosen > 0 && std::exp(lp(chosen)) == 0.0) --chosen;
    return {chosen, lp(chosen)};
}

int greedy_action(const Vector& logits) {
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    return static_cast<int>(best);
}

}  // namespace explab::agent
