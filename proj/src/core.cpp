#include "fracflow/core.hpp"

#include "fracflow/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

namespace fracflow {

double dot(const Vec& a, const Vec& b)
{
    if (a.size() != b.size())
        throw DimensionError("dot: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Direction::Direction(Vec components) : c_(std::move(components))
{
    if (c_.empty()) throw DimensionError("direction must have dimension >= 1");
    for (double v : c_)
        if (!std::isfinite(v)) throw DomainError("direction has non-finite component");
    if (std::abs(norm(c_) - 1.0) > 1e-12) throw DomainError("direction is not a unit vector");
}

Direction Direction::normalized(Vec v)
{
    double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite vector");
    for (double& x : v) x /= n;
    return Direction(std::move(v));
}

double Direction::dot(const Vec& x) const { return fracflow::dot(c_, x); }

namespace {

double determinant(std::vector<Vec> m)
{
    const std::size_t n = m.size();
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

}  // namespace

Frame::Frame(std::vector<Vec> rows)
{
    const std::size_t d = rows.size();
    if (d == 0) throw DimensionError("frame must have at least one direction");
    for (const auto& r : rows)
        if (r.size() != d) throw DimensionError("frame rows must have length d");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double g = fracflow::dot(rows[i], rows[j]);
            if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-12)
                throw DomainError("frame directions are not orthonormal");
        }
    if (std::abs(std::abs(determinant(rows)) - 1.0) > 1e-10)
        throw DomainError("frame determinant is not +-1");
    dirs_.reserve(d);
    for (auto& r : rows) dirs_.emplace_back(std::move(r));
}

Frame Frame::canonical(std::size_t d)
{
    std::vector<Vec> rows(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) rows[i][i] = 1.0;
    return Frame(std::move(rows));
}

int Frame::aligned_axis(std::size_t l) const
{
    const Vec& c = dirs_.at(l).components();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (std::abs(std::abs(c[i]) - 1.0) <= 1e-14) return static_cast<int>(i);
    return -1;
}

bool Frame::is_canonical() const
{
    for (std::size_t l = 0; l < dim(); ++l)
        for (std::size_t i = 0; i < dim(); ++i)
            if (dirs_[l][i] != (l == i ? 1.0 : 0.0)) return false;
    return true;
}

Frame frame_from_angles(std::size_t d, const std::vector<double>& angles)
{
    if (d == 0) throw DimensionError("frame dimension must be >= 1");
    if (angles.size() != d * (d - 1) / 2)
        throw DimensionError("frame_from_angles: expected " + std::to_string(d * (d - 1) / 2) +
                             " angles for d=" + std::to_string(d) + ", got " +
                             std::to_string(angles.size()));
    std::vector<Vec> m(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
    std::size_t a = 0;
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = p + 1; q < d; ++q, ++a) {
            const double c = std::cos(angles[a]), s = std::sin(angles[a]);
            if (angles[a] == 0.0) continue;
            // m <- G(p,q) * m, where G has rows c e_p + s e_q and -s e_p + c e_q
            for (std::size_t k = 0; k < d; ++k) {
                double mp = m[p][k], mq = m[q][k];
                m[p][k] = c * mp + s * mq;
                m[q][k] = -s * mp + c * mq;
            }
        }
    // Clean round-off so exact quarter turns stay exact and the 1e-12 checks hold.
    for (auto& r : m)
        for (double& v : r)
            if (std::abs(v) < 1e-15) v = 0.0;
    return Frame(std::move(m));
}

Frame frame_from_angles(const std::vector<double>& angles)
{
    if (angles.empty()) return Frame::canonical(1);
    if (angles.size() == 1) return frame_from_angles(2, angles);
    if (angles.size() == 3) return frame_from_angles(3, angles);
    std::size_t d = 2;
    while (d * (d - 1) / 2 < angles.size()) ++d;
    return frame_from_angles(d, angles);
}

Vec project(const Vec& x, const Frame& frame)
{
    if (x.size() != frame.dim()) throw DimensionError("project: point and frame dimensions differ");
    Vec out(frame.dim());
    for (std::size_t l = 0; l < frame.dim(); ++l) out[l] = frame[l].dot(x);
    return out;
}

// ---------------------------------------------------------------- Grid

Grid::Grid(std::vector<std::size_t> n, Vec length, Vec origin) : n_(std::move(n)), l_(std::move(length)), o_(std::move(origin))
{
    if (n_.empty()) throw DimensionError("grid dimension must be >= 1");
    if (l_.size() != n_.size()) throw DimensionError("grid: extent count differs from axis count");
    if (o_.empty()) {
        o_.resize(l_.size());
        for (std::size_t a = 0; a < l_.size(); ++a) o_[a] = -0.5 * l_[a];
    }
    if (o_.size() != n_.size()) throw DimensionError("grid: origin count differs from axis count");
    for (std::size_t a = 0; a < n_.size(); ++a) {
        if (n_[a] < 8 || (n_[a] & (n_[a] - 1)) != 0)
            throw DomainError("grid: N must be a power of two >= 8 (axis " + std::to_string(a) + ")");
        if (!(l_[a] > 0.0) || !std::isfinite(l_[a])) throw DomainError("grid: extent must be positive");
        if (!std::isfinite(o_[a])) throw DomainError("grid: origin must be finite");
    }
    stride_.assign(n_.size(), 1);
    for (std::size_t a = n_.size(); a-- > 1;) stride_[a - 1] = stride_[a] * n_[a];
    size_ = stride_[0] * n_[0];
}

Grid Grid::cube(std::size_t d, std::size_t n, double length)
{
    return Grid(std::vector<std::size_t>(d, n), Vec(d, length));
}

double Grid::cell_volume() const
{
    double v = 1.0;
    for (std::size_t a = 0; a < dim(); ++a) v *= dx(a);
    return v;
}

std::vector<std::size_t> Grid::unravel(std::size_t flat) const
{
    std::vector<std::size_t> idx(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        idx[a] = flat / stride_[a];
        flat %= stride_[a];
    }
    return idx;
}

Vec Grid::point(std::size_t flat) const
{
    Vec x(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        x[a] = coord(a, flat / stride_[a]);
        flat %= stride_[a];
    }
    return x;
}

long Grid::mode(std::size_t axis, std::size_t i) const
{
    const long n = static_cast<long>(n_[axis]);
    const long m = static_cast<long>(i);
    return m < n / 2 ? m : m - n;
}

double Grid::wavenumber(std::size_t axis, std::size_t i) const
{
    return 2.0 * kPi * static_cast<double>(mode(axis, i)) / l_[axis];
}

Vec Grid::wavevector(std::size_t flat) const
{
    Vec k(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        k[a] = wavenumber(a, flat / stride_[a]);
        flat %= stride_[a];
    }
    return k;
}

ScalarField::ScalarField(Grid g, Vec v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid.size())
        throw DimensionError("scalar field: value count " + std::to_string(values.size()) +
                             " differs from grid size " + std::to_string(grid.size()));
}

ScalarField::ScalarField(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}

SpectralField::SpectralField(Grid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid.size())
        throw DimensionError("spectral field: value count differs from grid size");
}

SpectralField::SpectralField(Grid g) : grid(std::move(g)), values(grid.size(), cplx(0.0, 0.0)) {}

// ---------------------------------------------------------------- FFT

namespace {

std::mutex g_plan_mutex;

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        if (!p) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* p;
};

void run_fft(const Grid& g, std::vector<cplx>& data, int sign)
{
    const std::size_t n = g.size();
    FftwBuffer buf(n);
    std::vector<int> dims(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) dims[a] = static_cast<int>(g.n(a));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        plan = fftw_plan_dft(static_cast<int>(g.dim()), dims.data(), buf.p, buf.p, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw Error("fftw plan creation failed");
    for (std::size_t i = 0; i < n; ++i) {
        buf.p[i][0] = data[i].real();
        buf.p[i][1] = data[i].imag();
    }
    fftw_execute(plan);
    for (std::size_t i = 0; i < n; ++i) data[i] = cplx(buf.p[i][0], buf.p[i][1]);
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
}

// e^{i sign k.origin} for every mode, built as a product of per-axis phases.
std::vector<cplx> origin_phase(const Grid& g, double sign)
{
    std::vector<std::vector<cplx>> axis(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) {
        axis[a].resize(g.n(a));
        for (std::size_t i = 0; i < g.n(a); ++i) {
            // reduce k*origin modulo 2pi through the mode number to keep the phase accurate
            const double turns = static_cast<double>(g.mode(a, i)) * g.origin(a) / g.length(a);
            const double frac = turns - std::round(turns);
            axis[a][i] = std::polar(1.0, sign * 2.0 * kPi * frac);
        }
    }
    std::vector<cplx> out(g.size());
    for (std::size_t f = 0; f < g.size(); ++f) {
        std::size_t r = f;
        cplx p(1.0, 0.0);
        for (std::size_t a = 0; a < g.dim(); ++a) {
            p *= axis[a][r / g.stride(a)];
            r %= g.stride(a);
        }
        out[f] = p;
    }
    return out;
}

}  // namespace

SpectralField fourier_forward(const ScalarField& f)
{
    const Grid& g = f.grid;
    if (f.values.size() != g.size()) throw DimensionError("fourier_forward: size mismatch");
    std::vector<cplx> data(f.values.begin(), f.values.end());
    run_fft(g, data, FFTW_BACKWARD);
    const double vol = g.cell_volume();
    const auto ph = origin_phase(g, +1.0);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= vol * ph[i];
    return SpectralField(g, std::move(data));
}

std::vector<cplx> fourier_inverse_complex(const SpectralField& F)
{
    const Grid& g = F.grid;
    if (F.values.size() != g.size()) throw DimensionError("fourier_inverse: size mismatch");
    double box = 1.0;
    for (std::size_t a = 0; a < g.dim(); ++a) box *= g.length(a);
    const auto ph = origin_phase(g, -1.0);
    std::vector<cplx> data(F.values.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = F.values[i] * ph[i];
    run_fft(g, data, FFTW_FORWARD);
    for (auto& v : data) v /= box;
    return data;
}

ScalarField fourier_inverse(const SpectralField& F)
{
    auto data = fourier_inverse_complex(F);
    Vec out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real();
    return ScalarField(F.grid, std::move(out));
}

void multiply_symbol(SpectralField& F, const Symbol& symbol)
{
    const Grid& g = F.grid;
    const std::size_t d = g.dim();
    std::vector<std::size_t> nyq;
    Vec k(d);
    for (std::size_t f = 0; f < g.size(); ++f) {
        std::size_t r = f;
        nyq.clear();
        for (std::size_t a = 0; a < d; ++a) {
            std::size_t i = r / g.stride(a);
            r %= g.stride(a);
            k[a] = g.wavenumber(a, i);
            if (i == g.n(a) / 2) nyq.push_back(a);
        }
        cplx m;
        if (nyq.empty()) {
            m = symbol(k);
        } else {
            const std::size_t combos = std::size_t(1) << nyq.size();
            cplx acc(0.0, 0.0);
            Vec kk = k;
            for (std::size_t c = 0; c < combos; ++c) {
                for (std::size_t j = 0; j < nyq.size(); ++j)
                    kk[nyq[j]] = ((c >> j) & 1U) ? -k[nyq[j]] : k[nyq[j]];
                acc += symbol(kk);
            }
            m = acc / static_cast<double>(combos);
        }
        F.values[f] *= m;
    }
}

ScalarField apply_symbol(const ScalarField& f, const Symbol& symbol)
{
    SpectralField F = fourier_forward(f);
    multiply_symbol(F, symbol);
    return fourier_inverse(F);
}

double mass(const ScalarField& f)
{
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid.cell_volume();
}

double min_value(const ScalarField& f) { return *std::min_element(f.values.begin(), f.values.end()); }

double max_abs(const ScalarField& f)
{
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double l1_distance(const ScalarField& a, const ScalarField& b)
{
    if (a.grid != b.grid) throw DimensionError("l1_distance: grids differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
    return s * a.grid.cell_volume();
}

double l2_norm(const ScalarField& f)
{
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid.cell_volume());
}

double boundary_mass_fraction(const ScalarField& f)
{
    const Grid& g = f.grid;
    double total = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = std::abs(f.values[i]);
        total += v;
        auto idx = g.unravel(i);
        for (std::size_t a = 0; a < g.dim(); ++a)
            if (idx[a] == 0 || idx[a] + 1 == g.n(a)) {
                edge += v;
                break;
            }
    }
    return total > 0.0 ? edge / total : 0.0;
}

bool check_box(const ScalarField& f, double tol)
{
    const double frac = boundary_mass_fraction(f);
    if (frac > tol) {
        warn("box may be too small: boundary layer holds " + std::to_string(frac) +
             " of the field mass (tolerance " + std::to_string(tol) + ")");
        return false;
    }
    return true;
}

bool is_probability_density(const ScalarField& f)
{
    return min_value(f) >= -1e-9 && std::abs(mass(f) - 1.0) <= 5e-3;
}

ScalarField sample_field(const Grid& g, const std::function<double(const Vec&)>& fn)
{
    Vec v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = fn(g.point(i));
    return ScalarField(g, std::move(v));
}

ScalarField delta_field(const Grid& g)
{
    std::size_t flat = 0;
    for (std::size_t a = 0; a < g.dim(); ++a) {
        const double j = -g.origin(a) / g.dx(a);
        const double jr = std::round(j);
        if (std::abs(j - jr) > 1e-9 || jr < 0.0 || jr >= static_cast<double>(g.n(a)))
            throw DomainError("delta_field: x = 0 is not a grid point");
        flat += static_cast<std::size_t>(jr) * g.stride(a);
    }
    ScalarField f(g);
    f.values[flat] = 1.0 / g.cell_volume();
    return f;
}

}  // namespace fracflow
