#include "sk2d/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace sk2d {

LogPolarGrid::LogPolarGrid(double rho_min, double rho_max, int n_rho,
                           int n_theta, complex center)
    : rho_min_(rho_min), rho_max_(rho_max), n_rho_(n_rho), n_theta_(n_theta),
      center_(center) {
    if (!(rho_min < rho_max))
        throw std::invalid_argument("LogPolarGrid: rho_min must be < rho_max");
    if (n_rho < 4)
        throw std::invalid_argument("LogPolarGrid: n_rho must be >= 4");
    if (n_theta < 8 || n_theta % 2 != 0)
        throw std::invalid_argument("LogPolarGrid: n_theta must be even and >= 8");
    drho_ = (rho_max_ - rho_min_) / (n_rho_ - 1);
    dtheta_ = 2.0 * M_PI / n_theta_;
}

void LogPolarGrid::locate(complex z, double& fi, double& fj) const {
    complex w = z - center_;
    double rr = std::abs(w);
    if (rr <= 0.0)
        throw std::domain_error("LogPolarGrid::locate: point at grid center");
    double rho = std::log(rr);
    // Tiny slack absorbs roundoff at the boundary circles.
    double eps = 1e-12 * (rho_max_ - rho_min_);
    if (rho < rho_min_ - eps || rho > rho_max_ + eps)
        throw std::domain_error("LogPolarGrid::locate: point outside annulus");
    rho = std::clamp(rho, rho_min_, rho_max_);
    double th = std::arg(w);
    if (th < 0.0) th += 2.0 * M_PI;
    fi = (rho - rho_min_) / drho_;
    fj = th / dtheta_;
}

bool LogPolarGrid::contains(complex z, double slack) const {
    double rr = std::abs(z - center_);
    if (rr <= 0.0) return false;
    double rho = std::log(rr);
    return rho >= rho_min_ - slack && rho <= rho_max_ + slack;
}

bool LogPolarGrid::same_as(const LogPolarGrid& o) const {
    return rho_min_ == o.rho_min_ && rho_max_ == o.rho_max_ &&
           n_rho_ == o.n_rho_ && n_theta_ == o.n_theta_ && center_ == o.center_;
}

GridPtr make_grid(double rho_min, double rho_max, int n_rho, int n_theta,
                  complex center) {
    return std::make_shared<const LogPolarGrid>(rho_min, rho_max, n_rho,
                                                n_theta, center);
}

namespace detail {
void check_same_grid(const GridPtr& a, const GridPtr& b) {
    if (!a->same_as(*b))
        throw std::invalid_argument("fields live on different grids");
}
}  // namespace detail

ScalarField::ScalarField(GridPtr grid)
    : grid_(std::move(grid)), v_(grid_->size(), 0.0) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != grid_->size())
        throw std::invalid_argument("ScalarField: value count mismatch");
}

namespace {

// Shared bilinear interpolation over one component array.
double bilinear(const LogPolarGrid& g, const std::vector<double>& v, double fi,
                double fj) {
    int i0 = static_cast<int>(std::floor(fi));
    i0 = std::clamp(i0, 0, g.n_rho() - 2);
    int j0 = static_cast<int>(std::floor(fj));
    double si = fi - i0;
    double sj = fj - j0;
    double v00 = v[g.index(i0, j0)];
    double v01 = v[g.index(i0, j0 + 1)];
    double v10 = v[g.index(i0 + 1, j0)];
    double v11 = v[g.index(i0 + 1, j0 + 1)];
    return (1 - si) * ((1 - sj) * v00 + sj * v01) +
           si * ((1 - sj) * v10 + sj * v11);
}

}  // namespace

double ScalarField::interp(complex z) const {
    double fi, fj;
    grid_->locate(z, fi, fj);
    return bilinear(*grid_, v_, fi, fj);
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

double ScalarField::max_abs_interior(int margin) const {
    double m = 0.0;
    for (int i = margin; i < grid_->n_rho() - margin; ++i)
        for (int j = 0; j < grid_->n_theta(); ++j)
            m = std::max(m, std::abs(at(i, j)));
    return m;
}

void ScalarField::check_finite(const std::string& what) const {
    for (double x : v_)
        if (!std::isfinite(x))
            throw std::domain_error("non-finite value in " + what);
}

ComplexField::ComplexField(GridPtr grid)
    : grid_(std::move(grid)), v_(grid_->size(), complex{0.0, 0.0}) {}

double ComplexField::max_abs_interior(int margin) const {
    double m = 0.0;
    for (int i = margin; i < grid_->n_rho() - margin; ++i)
        for (int j = 0; j < grid_->n_theta(); ++j)
            m = std::max(m, std::abs(at(i, j)));
    return m;
}

OneFormField::OneFormField(GridPtr grid)
    : grid_(std::move(grid)), ax_(grid_->size(), 0.0), ay_(grid_->size(), 0.0) {}

void OneFormField::interp(complex z, double& out_ax, double& out_ay) const {
    double fi, fj;
    grid_->locate(z, fi, fj);
    out_ax = bilinear(*grid_, ax_, fi, fj);
    out_ay = bilinear(*grid_, ay_, fi, fj);
}

ScalarField sample(GridPtr grid, const std::function<double(complex)>& f) {
    ScalarField out(grid);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta(); ++j)
            out.at(i, j) = f(grid->point(i, j));
    return out;
}

ComplexField sample_complex(GridPtr grid,
                            const std::function<complex(complex)>& f) {
    ComplexField out(grid);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta(); ++j)
            out.at(i, j) = f(grid->point(i, j));
    return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << std::setprecision(17);
    return os;
}

}  // namespace

void dump_csv(const ScalarField& f, const std::string& path) {
    auto os = open_out(path);
    os << "rho,theta,value\n";
    const auto& g = f.grid();
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            os << g.rho(i) << ',' << g.theta(j) << ',' << f.at(i, j) << '\n';
}

void dump_csv(const ComplexField& f, const std::string& path) {
    auto os = open_out(path);
    os << "rho,theta,value_re,value_im\n";
    const auto& g = f.grid();
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            os << g.rho(i) << ',' << g.theta(j) << ',' << f.at(i, j).real()
               << ',' << f.at(i, j).imag() << '\n';
}

void dump_csv(const OneFormField& f, const std::string& path) {
    auto os = open_out(path);
    os << "rho,theta,a_x,a_y\n";
    const auto& g = f.grid();
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            os << g.rho(i) << ',' << g.theta(j) << ',' << f.ax(i, j) << ','
               << f.ay(i, j) << '\n';
}

}  // namespace sk2d
