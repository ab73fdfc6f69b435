#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "barslab/metric.hpp"

namespace barslab::mdp {

// Sparse kernel row: (next state, probability) pairs, ascending state index.
using KernelRow = std::vector<std::pair<int, double>>;

struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;
    std::vector<std::vector<KernelRow>> kernel;    // [state][action]
    std::vector<std::vector<double>> reward;       // [state][action], >= 0
    double discount = 0.0;                         // in [0, 1)
    std::optional<metric::FiniteMetricSpace> state_points;
    // Action embedding for gap checks; defaults to the action index on the
    // real line when empty.
    std::vector<std::vector<double>> action_points;

    // Row sums 1 +- 1e-12, rewards >= 0, discount < 1, indices in range.
    void validate() const;
    double reward_max() const;
    std::vector<double> action_point(int a) const;
};

// Uniform random dense MDP for tests and suites.
TabularMDP random_mdp(int n_states, int n_actions, double discount,
                      std::uint64_t seed);

struct Policy {
    std::vector<int> actions;                       // deterministic choice per state
    std::vector<std::vector<double>> distributions; // optional; rows sum to 1

    bool stochastic() const { return !distributions.empty(); }
    void validate(int n_states, int n_actions) const;
};

struct GapCertificate {
    double delta = 0.0;
    double epsilon = 0.0;
    bool holds = false;
    // Violating (state, action, optimal action) triple when holds is false.
    std::optional<std::array<int, 3>> witness;
};

struct ValueIterationResult {
    std::vector<double> values;
    int iterations = 0;
    std::vector<double> residuals;  // Bellman residual per sweep
    bool converged = false;
};

std::vector<double> bellman_policy_op(const TabularMDP& mdp, const Policy& policy,
                                      const std::vector<double>& values);
std::vector<double> bellman_optimality_op(const TabularMDP& mdp,
                                          const std::vector<double>& values);

// Iterate the optimality operator until the Bellman residual drops below
// tolerance.  Default sweep budget follows the geometric rate:
// ceil(log(tol*(1-gamma)/R_max)/log(gamma)) + 8.
ValueIterationResult value_iteration(const TabularMDP& mdp,
                                     const std::vector<double>& v0,
                                     double tolerance, int max_sweeps = -1);

// Argmax policy under one-step lookahead; ties resolve to the lowest index.
Policy greedy_policy(const TabularMDP& mdp, const std::vector<double>& values);

// Exact policy value via the dense linear system (I - gamma P^pi) V = r^pi.
std::vector<double> policy_evaluation(const TabularMDP& mdp, const Policy& policy);

double policy_return(const TabularMDP& mdp, const Policy& policy,
                     const std::vector<double>& initial_distribution);

struct PolicyIterationResult {
    Policy policy;
    std::vector<double> values;
    int iterations = 0;
};

// Exact oracle for the optimal policy; terminates finitely on tabular MDPs.
PolicyIterationResult policy_iteration(const TabularMDP& mdp);

struct StaticRegret {
    double total = 0.0;
    std::vector<double> per_step;
};

StaticRegret static_regret(const TabularMDP& mdp,
                           const std::vector<Policy>& policy_sequence,
                           const std::vector<double>& initial_distribution);

// (Delta, epsilon)-gap scan: for every state, every action farther than
// epsilon from the reward argmax must trail it by more than delta.
GapCertificate check_gap(const TabularMDP& mdp, double delta, double epsilon);

struct RewardSupport {
    std::vector<int> states;  // states with max_a r(s,a) != 0
    std::optional<metric::FiniteMetricSpace> subspace;
};

RewardSupport reward_support(const TabularMDP& mdp);

// Largest constant sparse reward that keeps any looping policy strictly
// below V*(s0) - epsilon: (1-gamma) * (V*(s0) - epsilon).
double loop_exploit_max_reward(double gamma, double v_star_s0, double epsilon);

// sqrt(K * ln(2/p)): smallest reward magnitude that beats the coupling noise.
double min_reward_for_accuracy(double K, double p);

double effective_reward_mass(const std::vector<double>& reward_values,
                             const std::vector<double>& measure_weights);

// Sufficiency check I_r >= sqrt(K ln(2/p)) + C0 * L * gamma2.
bool effective_mass_sufficient(double effective_mass, double K, double p,
                               double C0, double L, double gamma2_value);

}  // namespace barslab::mdp
