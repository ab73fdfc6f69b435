#include "barslab/mdp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "barslab/rng.hpp"

namespace barslab::mdp {

void TabularMDP::validate() const {
    if (n_states < 1 || n_actions < 1) {
        throw std::invalid_argument("TabularMDP: need n_states, n_actions >= 1");
    }
    if (!(discount >= 0.0 && discount < 1.0)) {
        throw std::invalid_argument("TabularMDP: discount must lie in [0,1)");
    }
    if (static_cast<int>(kernel.size()) != n_states ||
        static_cast<int>(reward.size()) != n_states) {
        throw std::invalid_argument("TabularMDP: kernel/reward shape mismatch");
    }
    for (int s = 0; s < n_states; ++s) {
        if (static_cast<int>(kernel[s].size()) != n_actions ||
            static_cast<int>(reward[s].size()) != n_actions) {
            throw std::invalid_argument("TabularMDP: row shape mismatch at state " +
                                        std::to_string(s));
        }
        for (int a = 0; a < n_actions; ++a) {
            if (reward[s][a] < 0.0) {
                throw std::invalid_argument("TabularMDP: negative reward at (" +
                                            std::to_string(s) + "," +
                                            std::to_string(a) + ")");
            }
            double sum = 0.0;
            for (const auto& [next, p] : kernel[s][a]) {
                if (next < 0 || next >= n_states) {
                    throw std::invalid_argument("TabularMDP: kernel index out of range");
                }
                if (p < 0.0) {
                    throw std::invalid_argument("TabularMDP: negative probability");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-12) {
                throw std::invalid_argument(
                    "TabularMDP: kernel row (" + std::to_string(s) + "," +
                    std::to_string(a) + ") sums to " + std::to_string(sum));
            }
        }
    }
    if (state_points && static_cast<int>(state_points->size()) != n_states) {
        throw std::invalid_argument("TabularMDP: state embedding size mismatch");
    }
    if (!action_points.empty() &&
        static_cast<int>(action_points.size()) != n_actions) {
        throw std::invalid_argument("TabularMDP: action embedding size mismatch");
    }
}

double TabularMDP::reward_max() const {
    double m = 0.0;
    for (const auto& row : reward) {
        for (double r : row) m = std::max(m, r);
    }
    return m;
}

std::vector<double> TabularMDP::action_point(int a) const {
    if (!action_points.empty()) return action_points[static_cast<std::size_t>(a)];
    return {static_cast<double>(a)};
}

TabularMDP random_mdp(int n_states, int n_actions, double discount,
                      std::uint64_t seed) {
    Rng rng(derive_seed(seed, "random-mdp"));
    TabularMDP m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.discount = discount;
    m.kernel.assign(n_states, std::vector<KernelRow>(n_actions));
    m.reward.assign(n_states, std::vector<double>(n_actions, 0.0));
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            m.reward[s][a] = rng.uniform();
            double total = 0.0;
            std::vector<double> w(n_states);
            for (int t = 0; t < n_states; ++t) {
                w[t] = -std::log(1.0 - rng.uniform());
                total += w[t];
            }
            KernelRow row;
            double acc = 0.0;
            for (int t = 0; t < n_states - 1; ++t) {
                const double p = w[t] / total;
                acc += p;
                row.emplace_back(t, p);
            }
            row.emplace_back(n_states - 1, 1.0 - acc);
            m.kernel[s][a] = std::move(row);
        }
    }
    return m;
}

void Policy::validate(int n_states, int n_actions) const {
    if (static_cast<int>(actions.size()) != n_states) {
        throw std::invalid_argument("Policy: wrong number of states");
    }
    for (int a : actions) {
        if (a < 0 || a >= n_actions) {
            throw std::invalid_argument("Policy: action index out of range");
        }
    }
    if (stochastic()) {
        if (static_cast<int>(distributions.size()) != n_states) {
            throw std::invalid_argument("Policy: distribution shape mismatch");
        }
        for (const auto& d : distributions) {
            if (static_cast<int>(d.size()) != n_actions) {
                throw std::invalid_argument("Policy: distribution shape mismatch");
            }
            double sum = 0.0;
            for (double p : d) sum += p;
            if (std::abs(sum - 1.0) > 1e-9) {
                throw std::invalid_argument("Policy: distribution does not sum to 1");
            }
        }
    }
}

namespace {

double q_value(const TabularMDP& mdp, int s, int a, const std::vector<double>& v) {
    double acc = 0.0;
    for (const auto& [next, p] : mdp.kernel[s][a]) {
        acc += p * v[static_cast<std::size_t>(next)];
    }
    return mdp.reward[s][a] + mdp.discount * acc;
}

}  // namespace

std::vector<double> bellman_policy_op(const TabularMDP& mdp, const Policy& policy,
                                      const std::vector<double>& values) {
    policy.validate(mdp.n_states, mdp.n_actions);
    if (static_cast<int>(values.size()) != mdp.n_states) {
        throw std::invalid_argument("bellman_policy_op: value shape mismatch");
    }
    std::vector<double> out(values.size(), 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
        if (policy.stochastic()) {
            double acc = 0.0;
            for (int a = 0; a < mdp.n_actions; ++a) {
                acc += policy.distributions[s][a] * q_value(mdp, s, a, values);
            }
            out[s] = acc;
        } else {
            out[s] = q_value(mdp, s, policy.actions[s], values);
        }
    }
    return out;
}

std::vector<double> bellman_optimality_op(const TabularMDP& mdp,
                                          const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != mdp.n_states) {
        throw std::invalid_argument("bellman_optimality_op: value shape mismatch");
    }
    std::vector<double> out(values.size(), 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.n_actions; ++a) {
            best = std::max(best, q_value(mdp, s, a, values));
        }
        out[s] = best;
    }
    return out;
}

ValueIterationResult value_iteration(const TabularMDP& mdp,
                                     const std::vector<double>& v0,
                                     double tolerance, int max_sweeps) {
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("value_iteration: tolerance must be > 0");
    }
    if (max_sweeps < 0) {
        const double rmax = mdp.reward_max();
        if (mdp.discount <= 0.0 || rmax <= 0.0) {
            max_sweeps = 9;
        } else {
            const double k = std::log(tolerance * (1.0 - mdp.discount) / rmax) /
                             std::log(mdp.discount);
            max_sweeps = static_cast<int>(std::ceil(std::max(k, 1.0))) + 8;
        }
    }
    ValueIterationResult res;
    res.values = v0;
    for (int k = 0; k <= max_sweeps; ++k) {
        std::vector<double> tv = bellman_optimality_op(mdp, res.values);
        double resid = 0.0;
        for (std::size_t i = 0; i < tv.size(); ++i) {
            resid = std::max(resid, std::abs(tv[i] - res.values[i]));
        }
        res.residuals.push_back(resid);
        if (resid <= tolerance) {
            res.converged = true;
            res.iterations = k;
            return res;
        }
        res.values = std::move(tv);
        res.iterations = k + 1;
    }
    res.converged = false;
    return res;
}

Policy greedy_policy(const TabularMDP& mdp, const std::vector<double>& values) {
    Policy pi;
    pi.actions.resize(static_cast<std::size_t>(mdp.n_states), 0);
    for (int s = 0; s < mdp.n_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double q = q_value(mdp, s, a, values);
            if (q > best) {
                best = q;
                arg = a;
            }
        }
        pi.actions[static_cast<std::size_t>(s)] = arg;
    }
    return pi;
}

std::vector<double> policy_evaluation(const TabularMDP& mdp, const Policy& policy) {
    policy.validate(mdp.n_states, mdp.n_actions);
    const int n = mdp.n_states;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (int s = 0; s < n; ++s) {
        if (policy.stochastic()) {
            double r = 0.0;
            for (int a = 0; a < mdp.n_actions; ++a) {
                const double w = policy.distributions[s][a];
                if (w == 0.0) continue;
                r += w * mdp.reward[s][a];
                for (const auto& [next, p] : mdp.kernel[s][a]) {
                    A(s, next) -= mdp.discount * w * p;
                }
            }
            b(s) = r;
        } else {
            const int a = policy.actions[static_cast<std::size_t>(s)];
            b(s) = mdp.reward[s][a];
            for (const auto& [next, p] : mdp.kernel[s][a]) {
                A(s, next) -= mdp.discount * p;
            }
        }
    }
    Eigen::VectorXd v = A.partialPivLu().solve(b);
    if (!v.allFinite()) {
        throw std::runtime_error("policy_evaluation: linear solve produced non-finite values");
    }
    return std::vector<double>(v.data(), v.data() + n);
}

double policy_return(const TabularMDP& mdp, const Policy& policy,
                     const std::vector<double>& initial_distribution) {
    if (static_cast<int>(initial_distribution.size()) != mdp.n_states) {
        throw std::invalid_argument("policy_return: distribution shape mismatch");
    }
    double sum = 0.0;
    for (double w : initial_distribution) {
        if (w < 0.0) throw std::invalid_argument("policy_return: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("policy_return: distribution must sum to 1");
    }
    const std::vector<double> v = policy_evaluation(mdp, policy);
    double j = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        j += initial_distribution[static_cast<std::size_t>(s)] *
             v[static_cast<std::size_t>(s)];
    }
    return j;
}

PolicyIterationResult policy_iteration(const TabularMDP& mdp) {
    PolicyIterationResult res;
    res.policy.actions.assign(static_cast<std::size_t>(mdp.n_states), 0);
    // Finite termination: strictly improving over at most A^S policies.
    const int guard = 1000;
    for (int it = 0; it < guard; ++it) {
        res.values = policy_evaluation(mdp, res.policy);
        Policy next = greedy_policy(mdp, res.values);
        res.iterations = it + 1;
        if (next.actions == res.policy.actions) {
            return res;
        }
        res.policy = std::move(next);
    }
    throw std::runtime_error("policy_iteration: no convergence within guard budget");
}

StaticRegret static_regret(const TabularMDP& mdp,
                           const std::vector<Policy>& policy_sequence,
                           const std::vector<double>& initial_distribution) {
    const auto opt = policy_iteration(mdp);
    const double j_star = policy_return(mdp, opt.policy, initial_distribution);
    StaticRegret out;
    out.per_step.reserve(policy_sequence.size());
    for (const auto& pi : policy_sequence) {
        const double gap = j_star - policy_return(mdp, pi, initial_distribution);
        out.per_step.push_back(gap);
        out.total += gap;
    }
    return out;
}

GapCertificate check_gap(const TabularMDP& mdp, double delta, double epsilon) {
    if (!(delta > 0.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument("check_gap: delta and epsilon must be > 0");
    }
    GapCertificate cert;
    cert.delta = delta;
    cert.epsilon = epsilon;
    cert.holds = true;

    auto action_dist = [&](int a, int b) {
        const auto pa = mdp.action_point(a);
        const auto pb = mdp.action_point(b);
        double s = 0.0;
        for (std::size_t k = 0; k < pa.size(); ++k) {
            const double d = pa[k] - pb[k];
            s += d * d;
        }
        return std::sqrt(s);
    };

    for (int s = 0; s < mdp.n_states; ++s) {
        int a_star = 0;
        for (int a = 1; a < mdp.n_actions; ++a) {
            if (mdp.reward[s][a] > mdp.reward[s][a_star]) a_star = a;
        }
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (a == a_star) continue;
            if (action_dist(a, a_star) > epsilon &&
                !(mdp.reward[s][a_star] - mdp.reward[s][a] > delta)) {
                cert.holds = false;
                cert.witness = std::array<int, 3>{s, a, a_star};
                return cert;
            }
        }
    }
    return cert;
}

RewardSupport reward_support(const TabularMDP& mdp) {
    RewardSupport out;
    for (int s = 0; s < mdp.n_states; ++s) {
        double m = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            m = std::max(m, std::abs(mdp.reward[s][a]));
        }
        if (m != 0.0) out.states.push_back(s);
    }
    if (mdp.state_points && !out.states.empty()) {
        out.subspace = mdp.state_points->restrict(out.states);
    }
    return out;
}

double loop_exploit_max_reward(double gamma, double v_star_s0, double epsilon) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("loop_exploit_max_reward: gamma must lie in [0,1)");
    }
    if (epsilon < 0.0 || v_star_s0 < epsilon) {
        throw std::invalid_argument(
            "loop_exploit_max_reward: need v_star_s0 >= epsilon >= 0");
    }
    return (1.0 - gamma) * (v_star_s0 - epsilon);
}

double min_reward_for_accuracy(double K, double p) {
    if (!(K > 0.0)) {
        throw std::invalid_argument("min_reward_for_accuracy: K must be > 0");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("min_reward_for_accuracy: p must lie in (0,1)");
    }
    return std::sqrt(K * std::log(2.0 / p));
}

double effective_reward_mass(const std::vector<double>& reward_values,
                             const std::vector<double>& measure_weights) {
    if (reward_values.size() != measure_weights.size()) {
        throw std::invalid_argument("effective_reward_mass: length mismatch");
    }
    double sum = 0.0;
    for (double w : measure_weights) {
        if (w < 0.0) {
            throw std::invalid_argument("effective_reward_mass: negative weight");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("effective_reward_mass: weights must sum to 1");
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < reward_values.size(); ++i) {
        mass += reward_values[i] * measure_weights[i];
    }
    return mass;
}

bool effective_mass_sufficient(double effective_mass, double K, double p,
                               double C0, double L, double gamma2_value) {
    return effective_mass >= min_reward_for_accuracy(K, p) + C0 * L * gamma2_value;
}

}  // namespace barslab::mdp
