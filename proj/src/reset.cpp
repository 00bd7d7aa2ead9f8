#include "fohs/reset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include <Eigen/SVD>

#include "fohs/csv.hpp"
#include "fohs/error.hpp"
#include "fohs/parallel.hpp"
#include "fohs/projection.hpp"

namespace fohs {

namespace {

std::size_t degree_of(const std::vector<double>& c) {
    for (std::size_t k = c.size(); k-- > 0;) {
        if (c[k] != 0.0) {
            return k;
        }
    }
    return 0;
}

std::string format_order(double q) {
    std::ostringstream os;
    os.precision(12);
    os << q;
    return os.str();
}

struct Rational {
    long long num;
    long long den;
};

std::optional<Rational> as_rational(double x) {
    for (long long den = 1; den <= 10000; ++den) {
        const double scaled = x * static_cast<double>(den);
        const double num = std::round(scaled);
        if (std::abs(scaled - num) <= 1e-9 * std::max(1.0, std::abs(scaled))) {
            return Rational{static_cast<long long>(num), den};
        }
    }
    return std::nullopt;
}

Matrix blockdiag_reset(const ResetDims& d) {
    Matrix ar = Matrix::Identity(d.total(), d.total());
    for (Eigen::Index i = d.total() - d.n_reset; i < d.total(); ++i) {
        ar(i, i) = 0.0;
    }
    return ar;
}

Matrix transformed_matrix(const ResetControlSystem& sys) {
    return sys.alpha == 1.0 ? sys.a_cl : curly_a(sys.a_cl, sys.alpha);
}

RowVector padded_row(const ResetControlSystem& sys) {
    RowVector row = RowVector::Zero(sys.dims.total());
    row.head(sys.dims.n_p) = sys.effective_beta_row();
    return row;
}

void require_single_reset(const ResetDims& d) {
    if (d.n_reset != 1) {
        fail(ErrorKind::DimensionMismatch,
             "the scalar H_beta form needs exactly one reset state, got " + std::to_string(d.n_reset));
    }
}

} // namespace

void CommensurateTransferFunction::validate() const {
    if (!(base_order > 0.0 && base_order <= 1.0)) {
        fail(ErrorKind::OrderOutOfRange, "base order must lie in (0, 1], got " + format_order(base_order));
    }
    if (numerator.empty() || denominator.empty()) {
        fail(ErrorKind::InvalidArgument, "transfer function coefficient lists must be non-empty");
    }
    for (const auto* list : {&numerator, &denominator}) {
        for (double c : *list) {
            if (!std::isfinite(c)) {
                fail(ErrorKind::InvalidArgument, "transfer function coefficients must be finite");
            }
        }
    }
    if (std::all_of(denominator.begin(), denominator.end(), [](double c) { return c == 0.0; })) {
        fail(ErrorKind::InvalidArgument, "denominator is identically zero");
    }
}

std::size_t CommensurateTransferFunction::num_degree() const { return degree_of(numerator); }
std::size_t CommensurateTransferFunction::den_degree() const { return degree_of(denominator); }

Complex CommensurateTransferFunction::evaluate(Complex s) const {
    const Complex sq = std::pow(s, base_order);
    auto horner = [&](const std::vector<double>& c) {
        Complex acc = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) {
            acc = acc * sq + c[k];
        }
        return acc;
    };
    return horner(numerator) / horner(denominator);
}

PseudoStateSpace tf_to_ss(const CommensurateTransferFunction& tf) {
    tf.validate();
    const std::size_t n = tf.den_degree();
    const std::size_t m = tf.num_degree();
    if (m > n) {
        fail(ErrorKind::ImproperTransferFunction,
             "numerator degree " + std::to_string(m) + " exceeds denominator degree " + std::to_string(n));
    }
    const double lead = tf.denominator[n];
    std::vector<double> a(n + 1, 0.0);
    std::vector<double> b(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
        a[k] = tf.denominator[k] / lead;
        if (k < tf.numerator.size()) {
            b[k] = tf.numerator[k] / lead;
        }
    }

    PseudoStateSpace ss;
    ss.order = tf.base_order;
    ss.d = b[n];
    const auto ni = static_cast<Eigen::Index>(n);
    ss.a = Matrix::Zero(ni, ni);
    ss.b = Vector::Zero(ni);
    ss.c = RowVector::Zero(ni);
    for (Eigen::Index i = 0; i + 1 < ni; ++i) {
        ss.a(i, i + 1) = 1.0;
    }
    for (Eigen::Index k = 0; k < ni; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        ss.a(ni - 1, k) = -a[ku];
        ss.c(k) = b[ku] - ss.d * a[ku];
    }
    if (ni > 0) {
        ss.b(ni - 1) = 1.0;
    }
    return ss;
}

CommensurateTransferFunction commensurate_rebase(const CommensurateTransferFunction& tf, double q_new) {
    tf.validate();
    if (!(q_new > 0.0)) {
        fail(ErrorKind::IncommensurateOrders, "target order must be positive, got " + format_order(q_new));
    }
    const double ratio = tf.base_order / q_new;
    const double k = std::round(ratio);
    if (k < 1.0 || std::abs(ratio - k) > 1e-9 * ratio) {
        fail(ErrorKind::IncommensurateOrders, "exponent step " + format_order(tf.base_order) +
                                                  " is not an integer multiple of " + format_order(q_new));
    }
    const auto factor = static_cast<std::size_t>(k);
    auto spread = [factor](const std::vector<double>& c) {
        std::vector<double> out((c.size() - 1) * factor + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            out[i * factor] = c[i];
        }
        return out;
    };
    return {q_new, spread(tf.numerator), spread(tf.denominator)};
}

double common_base_order(const std::vector<double>& orders) {
    if (orders.empty()) {
        fail(ErrorKind::InvalidArgument, "no orders given");
    }
    std::vector<Rational> rs;
    for (double q : orders) {
        const auto r = q > 0.0 ? as_rational(q) : std::nullopt;
        if (!r) {
            fail(ErrorKind::IncommensurateOrders, "order " + format_order(q) + " has no rational base");
        }
        rs.push_back(*r);
    }
    long long lcm = 1;
    for (const auto& r : rs) {
        lcm = std::lcm(lcm, r.den);
    }
    long long g = 0;
    for (const auto& r : rs) {
        g = std::gcd(g, r.num * (lcm / r.den));
    }
    return static_cast<double>(g) / static_cast<double>(lcm);
}

CommensurateTransferFunction multiply(const CommensurateTransferFunction& lhs,
                                      const CommensurateTransferFunction& rhs) {
    lhs.validate();
    rhs.validate();
    const double q = common_base_order({lhs.base_order, rhs.base_order});
    const auto l = commensurate_rebase(lhs, q);
    const auto r = commensurate_rebase(rhs, q);
    auto conv = [](const std::vector<double>& x, const std::vector<double>& y) {
        std::vector<double> out(x.size() + y.size() - 1, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = 0; j < y.size(); ++j) {
                out[i + j] += x[i] * y[j];
            }
        }
        return out;
    };
    return {q, conv(l.numerator, r.numerator), conv(l.denominator, r.denominator)};
}

void ResetControlSystem::validate() const {
    const Eigen::Index n = dims.total();
    if (n == 0 || a_cl.rows() != n || a_cl.cols() != n || b_cl.size() != n || c_cl.size() != n ||
        a_r.rows() != n || a_r.cols() != n) {
        fail(ErrorKind::DimensionMismatch, "closed-loop matrices do not match the partition sizes");
    }
    if (dims.n_p < 1 || dims.n_r < 1 || dims.n_reset < 0 || dims.n_reset > dims.n_r) {
        fail(ErrorKind::DimensionMismatch, "partition needs n_p >= 1, n_r >= 1 and 0 <= n_reset <= n_r");
    }
    if (!(alpha > 0.0 && alpha < 2.0)) {
        fail(ErrorKind::OrderOutOfRange, "order must lie in (0, 2), got " + format_order(alpha));
    }
    if ((a_r - blockdiag_reset(dims)).norm() != 0.0) {
        fail(ErrorKind::InvalidArgument, "reset map must zero exactly the trailing reset states");
    }
    if (beta_row.size() != 0 && beta_row.size() != dims.n_p) {
        fail(ErrorKind::DimensionMismatch, "beta_row must have one entry per plant state");
    }
}

RowVector ResetControlSystem::effective_beta_row() const {
    return beta_row.size() == 0 ? RowVector(c_cl.head(dims.n_p)) : beta_row;
}

bool ResetControlSystem::beta_row_is_surface_row() const {
    return beta_row.size() == 0 ||
           ((beta_row - c_cl.head(dims.n_p)).norm() <= 1e-12 && c_cl.tail(dims.total() - dims.n_p).isZero());
}

ResetControlSystem build_closed_loop(const CommensurateTransferFunction& plant,
                                     const CommensurateTransferFunction& controller,
                                     const CommensurateTransferFunction& reset_controller, double r,
                                     std::optional<Eigen::Index> n_reset) {
    plant.validate();
    controller.validate();
    reset_controller.validate();
    const double q =
        common_base_order({plant.base_order, controller.base_order, reset_controller.base_order});
    const auto p_tf = commensurate_rebase(plant, q);
    const auto c_tf = commensurate_rebase(controller, q);
    const auto r_tf = commensurate_rebase(reset_controller, q);

    if (!r_tf.strictly_proper()) {
        fail(ErrorKind::ImproperTransferFunction, "reset controller must be strictly proper");
    }

    PseudoStateSpace ps;
    PseudoStateSpace cs;
    bool absorbed = false;
    if (c_tf.strictly_proper()) {
        if (!p_tf.strictly_proper()) {
            fail(ErrorKind::ImproperTransferFunction, "plant must be strictly proper");
        }
        ps = tf_to_ss(p_tf);
        cs = tf_to_ss(c_tf);
    } else {
        // A controller with feedthrough (or derivative action) is merged into
        // the plant, so it contributes no states of its own.
        const auto loop = multiply(c_tf, p_tf);
        if (!loop.strictly_proper()) {
            fail(ErrorKind::ImproperTransferFunction, "controller times plant must be strictly proper");
        }
        ps = tf_to_ss(loop);
        absorbed = true;
    }
    const PseudoStateSpace rs = tf_to_ss(r_tf);

    ResetDims d;
    d.n_p = ps.a.rows();
    d.n_c = absorbed ? 0 : cs.a.rows();
    d.n_r = rs.a.rows();
    d.n_reset = n_reset.value_or(d.n_r);
    if (d.n_reset < 0 || d.n_reset > d.n_r) {
        fail(ErrorKind::DimensionMismatch, "n_reset must lie in [0, " + std::to_string(d.n_r) + "]");
    }
    const Eigen::Index n = d.total();
    const Eigen::Index oc = d.n_p;
    const Eigen::Index orr = d.n_p + d.n_c;

    ResetControlSystem sys;
    sys.alpha = q;
    sys.dims = d;
    sys.r = r;
    sys.a_cl = Matrix::Zero(n, n);
    sys.a_cl.block(0, 0, d.n_p, d.n_p) = ps.a;
    if (absorbed) {
        sys.a_cl.block(0, orr, d.n_p, d.n_r) = ps.b * rs.c;
    } else {
        sys.a_cl.block(0, oc, d.n_p, d.n_c) = ps.b * cs.c;
        sys.a_cl.block(oc, oc, d.n_c, d.n_c) = cs.a;
        sys.a_cl.block(oc, orr, d.n_c, d.n_r) = cs.b * rs.c;
    }
    sys.a_cl.block(orr, 0, d.n_r, d.n_p) = -rs.b * ps.c;
    sys.a_cl.block(orr, orr, d.n_r, d.n_r) = rs.a;

    sys.b_cl = Vector::Zero(n);
    sys.b_cl.tail(d.n_r) = rs.b;
    sys.c_cl = RowVector::Zero(n);
    sys.c_cl.head(d.n_p) = ps.c;
    sys.a_r = blockdiag_reset(d);
    sys.validate();
    return sys;
}

bool on_reset_surface(const ResetControlSystem& sys, const Vector& x, double offset, double surface_tol,
                      double state_tol) {
    if (x.size() != sys.dims.total()) {
        fail(ErrorKind::DimensionMismatch, "state has the wrong dimension");
    }
    const double e = sys.c_cl.dot(x) - offset;
    return std::abs(e) <= surface_tol * x.norm() && (x - sys.a_r * x).norm() > state_tol;
}

HBetaEvaluator::HBetaEvaluator(const ResetControlSystem& sys) : dims_(sys.dims) {
    sys.validate();
    if (dims_.n_reset < 1) {
        fail(ErrorKind::DimensionMismatch, "H_beta needs at least one reset state");
    }
    curly_ = transformed_matrix(sys);
    row_ = padded_row(sys);
    const CVector ev = eigenvalues(curly_);
    hurwitz_ = (ev.real().array() < 0.0).all();

    const Eigen::Index last = dims_.total() - 1;
    m_beta0_ = row_(last);
    m_beta1_ = row_.dot(curly_.col(last));
    m_reset1_ = curly_(last, last);
}

CMatrix HBetaEvaluator::resolve(Complex s) const {
    const Eigen::Index n = dims_.total();
    CMatrix m = -curly_.cast<Complex>();
    m.diagonal().array() += s;
    const Eigen::PartialPivLU<CMatrix> lu(m);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) {
        std::ostringstream os;
        os << "sI - A is singular at s = " << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag())
           << "j";
        fail(ErrorKind::SingularResolvent, os.str());
    }
    CMatrix rhs = CMatrix::Zero(n, dims_.n_reset);
    for (Eigen::Index k = 0; k < dims_.n_reset; ++k) {
        rhs(n - dims_.n_reset + k, k) = 1.0;
    }
    return lu.solve(rhs);
}

HBetaEvaluator::Parts HBetaEvaluator::parts(Complex s) const {
    require_single_reset(dims_);
    const CVector x = resolve(s).col(0);
    return {row_.cast<Complex>().dot(x), x(x.size() - 1)};
}

Complex HBetaEvaluator::evaluate(double beta, double p_r, Complex s) const {
    const Parts p = parts(s);
    return beta * p.beta_part + p_r * p.reset_part;
}

CMatrix HBetaEvaluator::evaluate(const Vector& beta, const Matrix& p_r, Complex s) const {
    const Eigen::Index nr = dims_.n_reset;
    if (beta.size() != nr || p_r.rows() != nr || p_r.cols() != nr) {
        fail(ErrorKind::DimensionMismatch, "beta and P_R must match the number of reset states");
    }
    const Eigen::Index n = dims_.total();
    Matrix t = Matrix::Zero(nr, n);
    t.leftCols(dims_.n_p) = beta * row_.head(dims_.n_p);
    t.rightCols(nr) = p_r;
    return t.cast<Complex>() * resolve(s);
}

Complex h_beta_evaluate(const ResetControlSystem& sys, double beta, double p_r, Complex s) {
    return HBetaEvaluator(sys).evaluate(beta, p_r, s);
}

HBetaTable::HBetaTable(const ResetControlSystem& sys, const FrequencyGrid& grid)
    : eval_(sys), omegas_(grid.omegas()), parts_(omegas_.size()) {
    require_single_reset(sys.dims);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool stable = eval_.hurwitz();
    parallel_for(omegas_.size(), [&](std::size_t i) {
        try {
            parts_[i] = eval_.parts(Complex(0.0, omegas_[i]));
        } catch (const Error& e) {
            // An unstable loop may have a pole on the axis; it cannot be SPR anyway.
            if (stable || e.kind() != ErrorKind::SingularResolvent) {
                throw;
            }
            parts_[i] = {Complex(nan, nan), Complex(nan, nan)};
        }
    });
}

std::vector<Complex> HBetaTable::values(double beta, double p_r) const {
    std::vector<Complex> h(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        h[i] = beta * parts_[i].beta_part + p_r * parts_[i].reset_part;
    }
    return h;
}

HBetaResult HBetaTable::check(double beta, double p_r, const SprOptions& options) const {
    if (!(p_r > 0.0)) {
        fail(ErrorKind::InvalidArgument, "P_R must be positive");
    }
    HBetaResult r;
    r.beta = beta;
    r.p_r = p_r;
    r.hurwitz = eval_.hurwitz();

    const double cb = beta * eval_.beta_markov0() + p_r;
    const double cab = beta * eval_.beta_markov1() + p_r * eval_.reset_markov1();
    r.asymptotic_ok = cb > 0.0 && -cab > 0.0;

    double worst = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        const Complex h = beta * parts_[i].beta_part + p_r * parts_[i].reset_part;
        if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) {
            finite = false;
            continue;
        }
        const double a = std::abs(std::arg(h));
        if (i == 0 || a > worst) {
            worst = a;
            r.argmax_omega = omegas_[i];
        }
    }
    r.min_phase_margin = finite ? kPi / 2.0 - worst : std::numeric_limits<double>::quiet_NaN();
    r.is_spr = r.hurwitz && r.asymptotic_ok && finite && worst < kPi / 2.0 - options.band;
    return r;
}

HBetaResult spr_phase_check(const ResetControlSystem& sys, double beta, double p_r, const FrequencyGrid& grid,
                            const SprOptions& options) {
    return HBetaTable(sys, grid).check(beta, p_r, options);
}

void write_hbeta_curve_csv(const HBetaTable& table, double beta, double p_r,
                           const std::filesystem::path& path) {
    CsvWriter csv(path, {"omega", "re", "im", "phase"});
    const auto h = table.values(beta, p_r);
    for (std::size_t i = 0; i < h.size(); ++i) {
        csv.row({table.omegas()[i], h[i].real(), h[i].imag(), std::arg(h[i])});
    }
}

BetaSearchResult beta_range_search(const ResetControlSystem& sys, const FrequencyGrid& grid,
                                   const BetaSearchOptions& options) {
    if (!(options.beta_lo < options.beta_hi) || !(options.step > 0.0) || !(options.width > 0.0)) {
        fail(ErrorKind::InvalidArgument, "beta search needs beta_lo < beta_hi and positive step and width");
    }
    const HBetaTable table(sys, grid);
    const auto count =
        static_cast<std::size_t>(std::floor((options.beta_hi - options.beta_lo) / options.step + 1e-9)) + 1;

    BetaSearchResult out;
    out.samples.resize(count);
    parallel_for(count, [&](std::size_t i) {
        const double beta = options.beta_lo + static_cast<double>(i) * options.step;
        const HBetaResult r = table.check(beta, options.p_r, options.spr);
        out.samples[i] = {beta, r.is_spr, r.min_phase_margin};
    });
    out.hurwitz = table.check(options.beta_lo, options.p_r, options.spr).hurwitz;

    auto refine = [&](double outside, double inside) {
        while (std::abs(inside - outside) > options.width) {
            const double mid = 0.5 * (outside + inside);
            (table.check(mid, options.p_r, options.spr).is_spr ? inside : outside) = mid;
        }
        return std::pair{outside, inside};
    };

    std::size_t i = 0;
    while (i < count) {
        if (!out.samples[i].is_spr) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < count && out.samples[j + 1].is_spr) {
            ++j;
        }
        BetaInterval iv{};
        if (i == 0) {
            iv.lower_outside = iv.lower_inside = out.samples[0].beta;
            iv.lower_at_limit = true;
        } else {
            std::tie(iv.lower_outside, iv.lower_inside) = refine(out.samples[i - 1].beta, out.samples[i].beta);
        }
        if (j + 1 == count) {
            iv.upper_outside = iv.upper_inside = out.samples[j].beta;
            iv.upper_at_limit = true;
        } else {
            std::tie(iv.upper_outside, iv.upper_inside) = refine(out.samples[j + 1].beta, out.samples[j].beta);
        }
        out.intervals.push_back(iv);
        i = j + 1;
    }
    return out;
}

void write_beta_csv(const BetaSearchResult& result, const std::filesystem::path& path) {
    CsvWriter csv(path, {"beta", "is_spr", "min_phase_margin"});
    for (const auto& s : result.samples) {
        csv.row({s.beta, static_cast<long long>(s.is_spr), s.min_phase_margin});
    }
}

ResetCertificateReport verify_reset_certificate(const ResetControlSystem& sys, const Matrix& p) {
    sys.validate();
    const Eigen::Index n = sys.dims.total();
    if (p.rows() != n || p.cols() != n) {
        fail(ErrorKind::DimensionMismatch, "P must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    const double scale = std::max(1.0, p.norm());
    if ((p - p.transpose()).norm() > 1e-9 * scale) {
        fail(ErrorKind::InvalidArgument, "P must be symmetric");
    }
    const Matrix ps = symmetrize(p);
    const Matrix m = transformed_matrix(sys);

    ResetCertificateReport rep;
    rep.p_min_eig = min_eigenvalue(ps);
    rep.flow_margin = -max_eigenvalue(m.transpose() * ps + ps * m);

    const Matrix jump = symmetrize(sys.a_r.transpose() * ps * sys.a_r - ps);
    rep.jump_margin_full = -max_eigenvalue(jump);

    auto restricted = [&](const Matrix& basis) {
        return basis.cols() == 0 ? 0.0 : -max_eigenvalue(basis.transpose() * jump * basis);
    };
    Matrix phi;
    if (sys.c_cl.norm() == 0.0) {
        phi = Matrix::Identity(n, n);
    } else {
        Eigen::JacobiSVD<Matrix> svd(Matrix(sys.c_cl), Eigen::ComputeFullV);
        phi = svd.matrixV().rightCols(n - 1);
    }
    rep.jump_margin_surface = restricted(phi);

    Matrix reset_basis = Matrix::Zero(n, sys.dims.n_reset);
    for (Eigen::Index k = 0; k < sys.dims.n_reset; ++k) {
        reset_basis(n - sys.dims.n_reset + k, k) = 1.0;
    }
    rep.jump_margin_reset_subspace = restricted(reset_basis);

    if (sys.dims.n_reset == 1) {
        const RowVector last = ps.row(n - 1);
        const RowVector row = sys.effective_beta_row();
        const RowVector head = last.head(sys.dims.n_p);
        const double rr = row.squaredNorm();
        const double beta = rr > 0.0 ? head.dot(row) / rr : 0.0;
        const double residual =
            (head - beta * row).norm() + last.segment(sys.dims.n_p, n - sys.dims.n_p - 1).norm();
        rep.structure_matches = residual <= 1e-8 * scale;
        if (rep.structure_matches) {
            rep.implied_beta = beta;
            rep.implied_p_r = last(n - 1);
        }
    }

    rep.low_order_caveat = sys.alpha <= 2.0 / 3.0;
    rep.accepted = rep.p_min_eig > 0.0 && rep.flow_margin > 0.0 && rep.jump_margin_surface >= -1e-12 * scale;
    return rep;
}

std::optional<Matrix> find_reset_certificate(const ResetControlSystem& sys, double beta, double p_r,
                                             const ResetSearchOptions& options) {
    sys.validate();
    require_single_reset(sys.dims);
    if (!(p_r > 0.0)) {
        fail(ErrorKind::InvalidArgument, "P_R must be positive");
    }
    const Eigen::Index n = sys.dims.total();
    const Matrix m = transformed_matrix(sys);
    const double scale = std::max(m.operatorNorm(), std::numeric_limits<double>::min());

    RowVector fixed = beta * padded_row(sys);
    fixed(n - 1) = p_r;

    std::vector<ConeConstraint> cones;
    cones.push_back({[](const Matrix& x) { return x; }, options.epsilon, 1e-2});
    cones.push_back({[m](const Matrix& x) { return Matrix(-symmetrize(m.transpose() * x + x * m)); },
                     options.epsilon * scale, 1e-2 * scale});

    std::vector<AffineConstraint> pattern;
    for (Eigen::Index j = 0; j < n; ++j) {
        Matrix w = Matrix::Zero(n, n);
        w(n - 1, j) += 0.5;
        w(j, n - 1) += 0.5;
        pattern.push_back({w, fixed(j)});
    }

    const ProjectionOutcome outcome = alternating_projections(n, cones, pattern, Matrix::Identity(n, n),
                                                              {options.max_iter, options.relaxation});
    if (!outcome.p) {
        return std::nullopt;
    }
    const ResetCertificateReport rep = verify_reset_certificate(sys, *outcome.p);
    if (!rep.accepted) {
        return std::nullopt;
    }
    return outcome.p;
}

} // namespace fohs
