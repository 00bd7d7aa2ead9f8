#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "fohs/matfrac.hpp"
#include "fohs/switching.hpp"

namespace fohs {

using RowVector = Eigen::RowVectorXd;

// sum_k num[k] s^(k q) / sum_k den[k] s^(k q)
struct CommensurateTransferFunction {
    double base_order = 1.0;
    std::vector<double> numerator;
    std::vector<double> denominator;

    void validate() const;
    [[nodiscard]] std::size_t num_degree() const;
    [[nodiscard]] std::size_t den_degree() const;
    [[nodiscard]] bool strictly_proper() const { return num_degree() < den_degree(); }
    [[nodiscard]] Complex evaluate(Complex s) const;
};

// D^q x = A x + B u,  y = C x + D u
struct PseudoStateSpace {
    Matrix a;
    Vector b;
    RowVector c;
    double d = 0.0;
    double order = 1.0;
};

// Controllable canonical form after making the denominator monic.
PseudoStateSpace tf_to_ss(const CommensurateTransferFunction& tf);

CommensurateTransferFunction commensurate_rebase(const CommensurateTransferFunction& tf, double q_new);

// Largest q with every order an integer multiple of q (orders are matched as
// rationals with denominators up to 10^4).
double common_base_order(const std::vector<double>& orders);

CommensurateTransferFunction multiply(const CommensurateTransferFunction& lhs,
                                      const CommensurateTransferFunction& rhs);

struct ResetDims {
    Eigen::Index n_p = 0;
    Eigen::Index n_c = 0;
    Eigen::Index n_r = 0;
    Eigen::Index n_reset = 0;  // trailing reset-controller states that are zeroed

    [[nodiscard]] Eigen::Index total() const { return n_p + n_c + n_r; }
};

struct ResetControlSystem {
    Matrix a_cl;
    Vector b_cl;
    RowVector c_cl;
    Matrix a_r;
    double alpha = 1.0;
    ResetDims dims;
    double r = 0.0;
    // Plant-partition row multiplied by beta inside H_beta. Empty means the
    // plant part of c_cl, i.e. the reset-surface row.
    RowVector beta_row;

    void validate() const;
    [[nodiscard]] RowVector effective_beta_row() const;
    [[nodiscard]] bool beta_row_is_surface_row() const;
};

ResetControlSystem build_closed_loop(const CommensurateTransferFunction& plant,
                                     const CommensurateTransferFunction& controller,
                                     const CommensurateTransferFunction& reset_controller, double r = 0.0,
                                     std::optional<Eigen::Index> n_reset = std::nullopt);

// x lies on the reset surface: |C x - offset| <= surface_tol * ||x|| and the
// reset actually moves the state.
bool on_reset_surface(const ResetControlSystem& sys, const Vector& x, double offset = 0.0,
                      double surface_tol = 1e-9, double state_tol = 1e-12);

// H_beta(s) = [beta*row, 0, P_R] (sI - A')^-1 [0; I_R] with A' the A-transform
// of a_cl. Linear in (beta, P_R), so the resolvent is solved once per s.
class HBetaEvaluator {
public:
    explicit HBetaEvaluator(const ResetControlSystem& sys);

    struct Parts {
        Complex beta_part;  // row * x
        Complex reset_part; // last entry of x
    };

    // x = (sI - A')^-1 e_last; requires n_reset == 1.
    [[nodiscard]] Parts parts(Complex s) const;
    [[nodiscard]] Complex evaluate(double beta, double p_r, Complex s) const;
    // General n_reset: beta is n_reset x 1, p_r is n_reset x n_reset.
    [[nodiscard]] CMatrix evaluate(const Vector& beta, const Matrix& p_r, Complex s) const;

    [[nodiscard]] const Matrix& transformed() const { return curly_; }
    [[nodiscard]] bool hurwitz() const { return hurwitz_; }
    // Markov parameters of the two parts: row*e, row*A'*e, e'*A'*e.
    [[nodiscard]] double beta_markov0() const { return m_beta0_; }
    [[nodiscard]] double beta_markov1() const { return m_beta1_; }
    [[nodiscard]] double reset_markov1() const { return m_reset1_; }

private:
    [[nodiscard]] CMatrix resolve(Complex s) const;

    ResetDims dims_;
    Matrix curly_;
    RowVector row_;
    bool hurwitz_ = false;
    double m_beta0_ = 0.0;
    double m_beta1_ = 0.0;
    double m_reset1_ = 0.0;
};

Complex h_beta_evaluate(const ResetControlSystem& sys, double beta, double p_r, Complex s);

struct SprOptions {
    double band = 0.0;
};

struct HBetaResult {
    double beta = 0.0;
    double p_r = 1.0;
    bool is_spr = false;
    bool hurwitz = false;
    bool asymptotic_ok = false;   // CB > 0 and -C A' B > 0
    double min_phase_margin = 0.0;  // pi/2 - max |arg H(jw)|
    double argmax_omega = 0.0;
};

// Frequency samples of the two H_beta parts, reusable across beta and P_R.
class HBetaTable {
public:
    HBetaTable(const ResetControlSystem& sys, const FrequencyGrid& grid);

    [[nodiscard]] HBetaResult check(double beta, double p_r, const SprOptions& options = {}) const;
    [[nodiscard]] std::vector<Complex> values(double beta, double p_r) const;
    [[nodiscard]] const std::vector<double>& omegas() const { return omegas_; }

private:
    HBetaEvaluator eval_;
    std::vector<double> omegas_;
    std::vector<HBetaEvaluator::Parts> parts_;
};

HBetaResult spr_phase_check(const ResetControlSystem& sys, double beta, double p_r = 1.0,
                            const FrequencyGrid& grid = {}, const SprOptions& options = {});

void write_hbeta_curve_csv(const HBetaTable& table, double beta, double p_r,
                           const std::filesystem::path& path);

struct BetaSearchOptions {
    double beta_lo = -5.0;
    double beta_hi = 5.0;
    double step = 0.01;
    double width = 1e-4;
    double p_r = 1.0;
    SprOptions spr;
};

// Each endpoint is a numeric bracket [outside, inside] of width <= options.width.
// An endpoint at the scan limit has outside == inside and the at_limit flag set.
struct BetaInterval {
    double lower_outside;
    double lower_inside;
    double upper_inside;
    double upper_outside;
    bool lower_at_limit = false;
    bool upper_at_limit = false;

    [[nodiscard]] double lower() const { return 0.5 * (lower_outside + lower_inside); }
    [[nodiscard]] double upper() const { return 0.5 * (upper_inside + upper_outside); }
};

struct BetaSample {
    double beta;
    bool is_spr;
    double min_phase_margin;
};

struct BetaSearchResult {
    std::vector<BetaInterval> intervals;
    std::vector<BetaSample> samples;
    bool hurwitz = false;
};

BetaSearchResult beta_range_search(const ResetControlSystem& sys, const FrequencyGrid& grid = {},
                                   const BetaSearchOptions& options = {});

void write_beta_csv(const BetaSearchResult& result, const std::filesystem::path& path);

struct ResetCertificateReport {
    double flow_margin = 0.0;                // -lambda_max(A'^T P + P A')
    double jump_margin_full = 0.0;           // -lambda_max(A_R^T P A_R - P)
    double jump_margin_surface = 0.0;        // same, restricted to ker c_cl
    double jump_margin_reset_subspace = 0.0; // same, restricted to range(I - A_R)
    double p_min_eig = 0.0;
    bool structure_matches = false;
    std::optional<double> implied_beta;
    std::optional<double> implied_p_r;
    bool low_order_caveat = false;           // alpha <= 2/3
    bool accepted = false;
};

ResetCertificateReport verify_reset_certificate(const ResetControlSystem& sys, const Matrix& p);

struct ResetSearchOptions {
    int max_iter = 5000;
    double epsilon = 1e-6;
    double relaxation = 1.8;
};

// P > 0 with last row fixed to [beta*row, 0, p_r] and a negative flow block.
std::optional<Matrix> find_reset_certificate(const ResetControlSystem& sys, double beta, double p_r = 1.0,
                                             const ResetSearchOptions& options = {});

} // namespace fohs
