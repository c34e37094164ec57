#include "rfcrn/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

namespace rfcrn {

std::string AssumptionCheck::failures() const
{
    std::string out;
    const auto add = [&](bool ok, const char* tag) {
        if (!ok) {
            out += out.empty() ? tag : std::string(", ") + tag;
        }
    };
    add(a, "(a)");
    add(b, "(b)");
    add(c, "(c)");
    add(d, "(d)");
    return out;
}

Quantization Quantization::make(int n_b, int n_tau, int n_kappa)
{
    if (n_tau < 1) {
        throw ValidationError("n_tau", "must be >= 1");
    }
    if (n_b <= n_tau) {
        throw ValidationError("N_b", "must exceed n_tau");
    }
    if (n_kappa < 0) {
        throw ValidationError("n_kappa", "must be >= 0");
    }
    Quantization q;
    q.n_b = n_b;
    q.n_tau = n_tau;
    q.n_kappa = n_kappa;
    q.e_q = 1.0;
    q.harvest_quanta = n_kappa;
    q.assumption.a = n_kappa + n_tau - 1 <= n_b - 1;
    q.assumption.b = n_kappa <= n_b - n_tau;
    q.assumption.c = q.harvest_quanta < n_b - n_tau + 1;
    q.assumption.d = true;
    return q;
}

Quantization quantize(const SystemParams& p, int n_tau)
{
    if (n_tau < 1) {
        throw ValidationError("n_tau", "must be >= 1");
    }
    const double e_active = p.e_s() + p.e_t();
    Quantization q;
    q.n_tau = n_tau;
    q.e_q = e_active / n_tau;
    q.n_b = static_cast<int>(robust_floor(p.B_max() / q.e_q));
    q.harvest_quanta = p.harvest_energy() / q.e_q;
    q.n_kappa = static_cast<int>(robust_floor(q.harvest_quanta));

    if (q.n_kappa < 1) {
        throw ValidationError("n_kappa",
                              "harvested energy per busy slot is below one quantum; the chain "
                              "cannot leave the harvesting states");
    }
    if (q.n_b <= n_tau) {
        throw ValidationError("B_max", "battery holds fewer than n_tau + 1 quanta");
    }
    AssumptionCheck& c = q.assumption;
    c.a = q.n_kappa + n_tau - 1 <= q.n_b - 1;
    c.b = q.n_kappa <= q.n_b - n_tau;
    c.c = q.harvest_quanta < q.n_b - n_tau + 1;
    c.d = q.n_b > (p.harvest_energy() / e_active + 1.0) * n_tau - 1.0;
    if (!c.ok()) {
        throw ValidationError("B_max", "battery quantisation violates condition(s) " +
                                           c.failures() + " (N_b = " + std::to_string(q.n_b) +
                                           ", n_tau = " + std::to_string(n_tau) +
                                           ", n_kappa = " + std::to_string(q.n_kappa) + ")");
    }
    return q;
}

TransitionMatrix::TransitionMatrix(Sparse u) : u_(std::move(u))
{
    u_.makeCompressed();
    if (u_.rows() != u_.cols()) {
        throw ValidationError("U", "transition matrix must be square");
    }
}

double TransitionMatrix::row_sum_error() const
{
    double worst = 0.0;
    for (int i = 0; i < u_.outerSize(); ++i) {
        double sum = 0.0;
        for (Sparse::InnerIterator it(u_, i); it; ++it) {
            sum += it.value();
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

void TransitionMatrix::write_csv(std::ostream& out) const
{
    const Eigen::MatrixXd d = dense();
    out.precision(17);
    for (int i = 0; i < d.rows(); ++i) {
        for (int j = 0; j < d.cols(); ++j) {
            out << (j ? "," : "") << d(i, j);
        }
        out << '\n';
    }
}

TransitionMatrix build_transition_matrix(const Quantization& q, double kappa, double tau)
{
    if (!(kappa >= 0.0 && kappa <= 1.0) || !(tau >= 0.0 && tau <= 1.0)) {
        throw ValidationError("U", "kappa and tau must be probabilities");
    }
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(2 * static_cast<std::size_t>(q.n_b));
    for (int i = 0; i < q.n_tau; ++i) {
        if (q.n_kappa == 0) {
            entries.emplace_back(i, i, 1.0);
            continue;
        }
        const int target = std::min(i + q.n_kappa, q.n_b - 1);
        entries.emplace_back(i, i, 1.0 - kappa);
        entries.emplace_back(i, target, kappa);
    }
    for (int i = q.n_tau; i < q.n_b; ++i) {
        entries.emplace_back(i, i - q.n_tau, tau);
        entries.emplace_back(i, i, 1.0 - tau);
    }
    TransitionMatrix::Sparse u(q.n_b, q.n_b);
    // Duplicates (e.g. a clipped jump onto itself) are summed.
    u.setFromTriplets(entries.begin(), entries.end());
    u.prune(0.0);
    TransitionMatrix result(std::move(u));
    if (result.row_sum_error() > 1e-12) {
        throw NumericError("transition matrix rows do not sum to 1");
    }
    return result;
}

double active_spend_prob(const Scenario& s, double eps)
{
    return transmit_prob(s.pair, s.sensing, eps);
}

TransitionMatrix build_transition_matrix(const Quantization& q, const Scenario& s, double eps)
{
    return build_transition_matrix(q, s.pair.p_o_h(), active_spend_prob(s, eps));
}

SteadyState steady_state_closed_form(const Quantization& q, double kappa, double tau)
{
    if (q.n_kappa < 1 || !(kappa > 0.0) || !(tau > 0.0)) {
        throw NumericError("degenerate chain: closed-form steady state needs n_kappa >= 1 and "
                           "kappa, tau > 0");
    }
    if (q.n_tau + q.n_kappa > q.n_b) {
        throw NumericError("harvesting jump leaves the battery range; assumption violated");
    }
    const double denom = q.n_kappa * kappa + q.n_tau * tau;
    SteadyState ss;
    ss.pi = Eigen::VectorXd::Zero(q.n_b);
    ss.pi.head(q.n_tau).setConstant(tau / denom);
    ss.pi.segment(q.n_tau, q.n_kappa).setConstant(kappa / denom);
    return ss;
}

SteadyState steady_state_closed_form(const Quantization& q, const Scenario& s, double eps)
{
    return steady_state_closed_form(q, s.pair.p_o_h(), active_spend_prob(s, eps));
}

namespace {

// Tarjan's strongly connected components over the positive entries of U.
struct Components {
    std::vector<int> id;
    int count = 0;
};

Components strongly_connected(const TransitionMatrix::Sparse& u)
{
    const int n = static_cast<int>(u.rows());
    Components c;
    c.id.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0;

    struct Frame {
        int v;
        TransitionMatrix::Sparse::InnerIterator it;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) {
            continue;
        }
        std::vector<Frame> call{{root, TransitionMatrix::Sparse::InnerIterator(u, root)}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.it) {
                const int w = static_cast<int>(f.it.col());
                const bool positive = f.it.value() > 0.0;
                ++f.it;
                if (!positive) {
                    continue;
                }
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, TransitionMatrix::Sparse::InnerIterator(u, w)});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const int v = f.v;
            call.pop_back();
            if (!call.empty()) {
                low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    c.id[w] = c.count;
                } while (w != v);
                ++c.count;
            }
        }
    }
    return c;
}

}  // namespace

int chain_period(const TransitionMatrix& u)
{
    const auto& m = u.sparse();
    const int n = u.size();
    const Components comp = strongly_connected(m);

    std::vector<bool> closed(comp.count, true);
    for (int i = 0; i < n; ++i) {
        for (TransitionMatrix::Sparse::InnerIterator it(m, i); it; ++it) {
            if (it.value() > 0.0 && comp.id[it.col()] != comp.id[i]) {
                closed[comp.id[i]] = false;
            }
        }
    }

    int worst = 1;
    std::vector<int> level(n, -1);
    for (int c = 0; c < comp.count; ++c) {
        if (!closed[c]) {
            continue;
        }
        int start = -1;
        for (int i = 0; i < n && start < 0; ++i) {
            if (comp.id[i] == c) {
                start = i;
            }
        }
        // BFS levels; the period is the gcd of level[v] + 1 - level[w] over class edges.
        std::vector<int> queue{start};
        level[start] = 0;
        int period = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int v = queue[head];
            for (TransitionMatrix::Sparse::InnerIterator it(m, v); it; ++it) {
                const int w = static_cast<int>(it.col());
                if (!(it.value() > 0.0) || comp.id[w] != c) {
                    continue;
                }
                if (level[w] < 0) {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                } else {
                    period = std::gcd(period, std::abs(level[v] + 1 - level[w]));
                }
            }
        }
        worst = std::max(worst, period == 0 ? 1 : period);
    }
    return worst;
}

SteadyState steady_state_numeric(const TransitionMatrix& u, double tol, int max_iter)
{
    if (u.row_sum_error() > 1e-10) {
        throw ValidationError("U", "matrix is not row-stochastic");
    }
    if (const int period = chain_period(u); period > 1) {
        throw NumericError("power iteration cannot converge: recurrent class has period " +
                           std::to_string(period));
    }
    const int n = u.size();
    const TransitionMatrix::Sparse& m = u.sparse();
    const int* outer = m.outerIndexPtr();
    const int* inner = m.innerIndexPtr();
    const double* value = m.valuePtr();
    // next = pi U as a scatter over the rows of U.
    const auto step = [&](const Eigen::VectorXd& from, Eigen::VectorXd& to) {
        to.setZero();
        for (int i = 0; i < n; ++i) {
            const double w = from[i];
            for (int p = outer[i]; p < outer[i + 1]; ++p) {
                to[inner[p]] += w * value[p];
            }
        }
    };
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
    Eigen::VectorXd next(n);
    double change = 0.0;
    constexpr int kCheckEvery = 8;  // norm and change are measured on every 8th step only
    for (int k = 1; k <= max_iter; ++k) {
        step(pi, next);
        if (k % kCheckEvery != 0 && k != max_iter) {
            pi.swap(next);
            continue;
        }
        next /= next.sum();
        change = (next - pi).lpNorm<1>();
        pi.swap(next);
        if (change < tol) {
            SteadyState ss;
            ss.iterations = k;
            step(pi, next);
            ss.residual = (next - pi).lpNorm<1>();
            ss.pi = std::move(pi);
            return ss;
        }
    }
    std::ostringstream msg;
    msg << "power iteration did not converge in " << max_iter << " iterations (residual "
        << change << ")";
    throw NumericError(msg.str());
}

double prob_active_mdp(const Quantization& q, const Scenario& s, double eps)
{
    const double kappa = s.pair.p_o_h();
    const double tau = active_spend_prob(s, eps);
    const double denom = q.n_kappa * kappa + q.n_tau * tau;
    if (q.n_kappa < 1 || !(denom > 0.0)) {
        throw NumericError("prob_active_mdp: degenerate chain (n_kappa kappa + n_tau tau = 0)");
    }
    return q.n_kappa * kappa / denom;
}

double prob_active_mdp_continuous(const Scenario& s, double eps)
{
    const double harvested = s.params.harvest_energy() * s.pair.p_o_h();
    const double spent = (s.params.e_s() + s.params.e_t()) * active_spend_prob(s, eps);
    if (!(harvested + spent > 0.0)) {
        throw NumericError("prob_active_mdp_continuous: degenerate rates");
    }
    return harvested / (harvested + spent);
}

double gamma2(const Scenario& s)
{
    const double harvested = s.params.harvest_energy() * s.pair.p_o_h();
    return harvested / (harvested + s.params.e_s() + s.params.e_t());
}

double mdp_objective(const Quantization& q, const Scenario& s, double eps)
{
    return (1.0 - prob_false_alarm(s.sensing, eps)) * prob_active_mdp(q, s, eps);
}

double mdp_objective_continuous(const Scenario& s, double eps)
{
    return (1.0 - prob_false_alarm(s.sensing, eps)) * prob_active_mdp_continuous(s, eps);
}

}  // namespace rfcrn
