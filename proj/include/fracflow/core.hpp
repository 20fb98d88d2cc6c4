#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace fracflow {

using Vec = std::vector<double>;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);

// Unit vector in R^d.
class Direction {
public:
    explicit Direction(Vec components);
    // Normalizes first; rejects the zero vector.
    static Direction normalized(Vec v);

    std::size_t dim() const { return c_.size(); }
    const Vec& components() const { return c_; }
    double operator[](std::size_t i) const { return c_[i]; }
    double dot(const Vec& x) const;

private:
    Vec c_;
};

// Ordered orthonormal basis theta_1..theta_d; rows of an orthogonal matrix.
class Frame {
public:
    explicit Frame(std::vector<Vec> rows);
    static Frame canonical(std::size_t d);

    std::size_t dim() const { return dirs_.size(); }
    const Direction& operator[](std::size_t l) const { return dirs_[l]; }
    const std::vector<Direction>& directions() const { return dirs_; }
    // Index of the coordinate axis theta_l is aligned with (up to sign), or -1.
    int aligned_axis(std::size_t l) const;
    bool is_canonical() const;

private:
    std::vector<Direction> dirs_;
};

// d=2: one angle. General d: d(d-1)/2 Givens angles in pair order (1,2),(1,3),...,(d-1,d).
Frame frame_from_angles(std::size_t d, const std::vector<double>& angles);
Frame frame_from_angles(const std::vector<double>& angles);  // d = 2 when one angle

// (theta_1.x, ..., theta_d.x)
Vec project(const Vec& x, const Frame& frame);

// Uniform periodic box. Flat storage is row-major (last axis fastest).
class Grid {
public:
    // origin defaults to -L/2 per axis, which places x = 0 on a grid point.
    Grid(std::vector<std::size_t> n, Vec length, Vec origin = {});
    static Grid cube(std::size_t d, std::size_t n, double length);

    std::size_t dim() const { return n_.size(); }
    std::size_t n(std::size_t axis) const { return n_[axis]; }
    double length(std::size_t axis) const { return l_[axis]; }
    double origin(std::size_t axis) const { return o_[axis]; }
    const std::vector<std::size_t>& shape() const { return n_; }
    const Vec& lengths() const { return l_; }
    const Vec& origins() const { return o_; }

    std::size_t size() const { return size_; }
    double dx(std::size_t axis) const { return l_[axis] / static_cast<double>(n_[axis]); }
    double cell_volume() const;
    std::size_t stride(std::size_t axis) const { return stride_[axis]; }

    double coord(std::size_t axis, std::size_t i) const { return o_[axis] + static_cast<double>(i) * dx(axis); }
    Vec point(std::size_t flat) const;
    std::vector<std::size_t> unravel(std::size_t flat) const;

    // Signed FFT-order mode number: i for i < N/2, i - N otherwise (so N/2 maps to -N/2).
    long mode(std::size_t axis, std::size_t i) const;
    double wavenumber(std::size_t axis, std::size_t i) const;
    Vec wavevector(std::size_t flat) const;

    bool operator==(const Grid& o) const { return n_ == o.n_ && l_ == o.l_ && o_ == o.o_; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    std::vector<std::size_t> n_;
    Vec l_, o_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 1;
};

struct ScalarField {
    ScalarField(Grid g, Vec v);
    explicit ScalarField(Grid g);  // zeros

    Grid grid;
    Vec values;
};

// Values indexed like the grid in FFT order along every axis.
struct SpectralField {
    SpectralField(Grid g, std::vector<cplx> v);
    explicit SpectralField(Grid g);

    Grid grid;
    std::vector<cplx> values;
};

// F(k) = sum f(x) e^{+ik.x} dx^d
SpectralField fourier_forward(const ScalarField& f);
// f(x) = (2pi)^{-d} sum F(k) e^{-ik.x} dk^d; the real part is returned.
ScalarField fourier_inverse(const SpectralField& F);
// Same as fourier_inverse but keeps the complex values.
std::vector<cplx> fourier_inverse_complex(const SpectralField& F);

using Symbol = std::function<cplx(const Vec& k)>;

// Multiplies F by the symbol. On modes sitting at the Nyquist index the
// symbol is averaged over both signs of each Nyquist component so that
// Hermitian symbols give exactly real results.
void multiply_symbol(SpectralField& F, const Symbol& symbol);
ScalarField apply_symbol(const ScalarField& f, const Symbol& symbol);

// Field diagnostics
double mass(const ScalarField& f);
double min_value(const ScalarField& f);
double max_abs(const ScalarField& f);
double l1_distance(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& f);
// Fraction of |f| mass lying in the outermost cell layer of the box.
double boundary_mass_fraction(const ScalarField& f);
// Emits a warning when the boundary layer holds more than tol of the mass.
bool check_box(const ScalarField& f, double tol = 1e-6);
// Density invariant: all values >= -1e-9 and mass 1 within 5e-3 (flagged, not enforced).
bool is_probability_density(const ScalarField& f);

ScalarField sample_field(const Grid& g, const std::function<double(const Vec&)>& fn);
// Band-limited discrete delta at x = 0; x = 0 must be a grid point.
ScalarField delta_field(const Grid& g);

}  // namespace fracflow
