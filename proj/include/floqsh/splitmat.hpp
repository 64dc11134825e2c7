#pragma once

#include <Eigen/Dense>

namespace floqsh {

/// Complex matrix stored as two real parts so products with real operator
/// matrices run as plain dgemm pairs.
struct SplitMat {
    Eigen::MatrixXd re, im;

    SplitMat() = default;
    SplitMat(int rows, int cols)
        : re(Eigen::MatrixXd::Zero(rows, cols)), im(Eigen::MatrixXd::Zero(rows, cols)) {}

    static SplitMat from(const Eigen::MatrixXcd& m) {
        SplitMat s;
        s.re = m.real();
        s.im = m.imag();
        return s;
    }

    Eigen::MatrixXcd to_complex() const {
        return re.cast<std::complex<double>>() +
               std::complex<double>(0, 1) * im.cast<std::complex<double>>();
    }

    Eigen::Index rows() const { return re.rows(); }
    Eigen::Index cols() const { return re.cols(); }

    void setZero() {
        re.setZero();
        im.setZero();
    }
    void resize_zero(int r, int c) {
        re = Eigen::MatrixXd::Zero(r, c);
        im = Eigen::MatrixXd::Zero(r, c);
    }

    double trace_re() const { return re.trace(); }

    void operator+=(const SplitMat& o) {
        re += o.re;
        im += o.im;
    }
    void add_scaled(const SplitMat& o, double c) {
        re += c * o.re;
        im += c * o.im;
    }

    /// this += conj(transpose(this)) restricted to square matrices.
    void add_own_adjoint() {
        re += re.transpose().eval();
        im -= im.transpose().eval();
    }
};

/// out = A * x (A real)
inline void mul_left(const Eigen::MatrixXd& A, const SplitMat& x, SplitMat& out) {
    out.re.noalias() = A * x.re;
    out.im.noalias() = A * x.im;
}

/// out += c * (A * x)
inline void add_mul_left(double c, const Eigen::MatrixXd& A, const SplitMat& x, SplitMat& out) {
    out.re.noalias() += c * (A * x.re);
    out.im.noalias() += c * (A * x.im);
}

/// out = x * B (B real)
inline void mul_right(const SplitMat& x, const Eigen::MatrixXd& B, SplitMat& out) {
    out.re.noalias() = x.re * B;
    out.im.noalias() = x.im * B;
}

/// out += c * (A * x * B), using tmp as scratch (resized as needed).
inline void add_mul_chain(double c, const Eigen::MatrixXd& A, const SplitMat& x,
                          const Eigen::MatrixXd& B, SplitMat& out, SplitMat& tmp) {
    tmp.re.noalias() = A * x.re;
    tmp.im.noalias() = A * x.im;
    out.re.noalias() += c * (tmp.re * B);
    out.im.noalias() += c * (tmp.im * B);
}

/// Elementwise phase rotation x_NM *= exp(i s (phase_row[N] - phase_col[M]))
/// realized as diagonal scalings by (cos, sin) vectors.
inline void rotate_rows(SplitMat& x, const Eigen::VectorXd& c, const Eigen::VectorXd& s) {
    // row scaling by (c + i s)
    Eigen::MatrixXd re = c.asDiagonal() * x.re - s.asDiagonal() * x.im;
    x.im = c.asDiagonal() * x.im + s.asDiagonal() * x.re;
    x.re = std::move(re);
}

inline void rotate_cols(SplitMat& x, const Eigen::VectorXd& c, const Eigen::VectorXd& s) {
    // column scaling by (c + i s)
    Eigen::MatrixXd re = x.re * c.asDiagonal() - x.im * s.asDiagonal();
    x.im = x.im * c.asDiagonal() + x.re * s.asDiagonal();
    x.re = std::move(re);
}

} // namespace floqsh
