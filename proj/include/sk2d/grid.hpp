#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sk2d {

using complex = std::complex<double>;

// Annulus around a puncture, discretised in (rho, theta) with rho = log r.
// theta is uniform on [0, 2pi) and periodic; rho rows run from rho_min to
// rho_max inclusive. Nodes are stored row-major, rho outer, theta inner.
class LogPolarGrid {
public:
    LogPolarGrid(double rho_min, double rho_max, int n_rho, int n_theta,
                 complex center = {0.0, 0.0});

    double rho_min() const { return rho_min_; }
    double rho_max() const { return rho_max_; }
    int n_rho() const { return n_rho_; }
    int n_theta() const { return n_theta_; }
    complex center() const { return center_; }

    double drho() const { return drho_; }
    double dtheta() const { return dtheta_; }

    double rho(int i) const { return rho_min_ + i * drho_; }
    double theta(int j) const { return wrap(j) * dtheta_; }
    double r(int i) const { return std::exp(rho(i)); }
    double r_min() const { return std::exp(rho_min_); }
    double r_max() const { return std::exp(rho_max_); }

    // Absolute position of node (i, j).
    complex point(int i, int j) const {
        double rr = r(i);
        double th = theta(j);
        return center_ + complex(rr * std::cos(th), rr * std::sin(th));
    }

    int wrap(int j) const {
        int m = j % n_theta_;
        return m < 0 ? m + n_theta_ : m;
    }
    int index(int i, int j) const { return i * n_theta_ + wrap(j); }
    int size() const { return n_rho_ * n_theta_; }

    // Fractional grid coordinates of an absolute point; throws std::domain_error
    // if the point lies outside the annulus.
    void locate(complex z, double& fi, double& fj) const;
    bool contains(complex z, double slack = 1e-12) const;

    bool same_as(const LogPolarGrid& other) const;

private:
    double rho_min_, rho_max_;
    int n_rho_, n_theta_;
    complex center_;
    double drho_, dtheta_;
};

using GridPtr = std::shared_ptr<const LogPolarGrid>;

GridPtr make_grid(double rho_min, double rho_max, int n_rho, int n_theta,
                  complex center = {0.0, 0.0});

namespace detail {
void check_same_grid(const GridPtr& a, const GridPtr& b);
}

// Real-valued samples on a LogPolarGrid.
class ScalarField {
public:
    explicit ScalarField(GridPtr grid);
    ScalarField(GridPtr grid, std::vector<double> values);

    const LogPolarGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    double& at(int i, int j) { return v_[grid_->index(i, j)]; }
    double at(int i, int j) const { return v_[grid_->index(i, j)]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    // Bilinear interpolation in (rho, theta).
    double interp(complex z) const;

    double max_abs() const;
    double max_abs_interior(int margin = 1) const;
    void check_finite(const std::string& what) const;

private:
    GridPtr grid_;
    std::vector<double> v_;
};

class ComplexField {
public:
    explicit ComplexField(GridPtr grid);

    const LogPolarGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    complex& at(int i, int j) { return v_[grid_->index(i, j)]; }
    complex at(int i, int j) const { return v_[grid_->index(i, j)]; }
    const std::vector<complex>& values() const { return v_; }

    double max_abs_interior(int margin = 1) const;

private:
    GridPtr grid_;
    std::vector<complex> v_;
};

// 1-form a_x dx + a_y dy sampled per node, components in the Cartesian frame.
class OneFormField {
public:
    explicit OneFormField(GridPtr grid);

    const LogPolarGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    double& ax(int i, int j) { return ax_[grid_->index(i, j)]; }
    double ax(int i, int j) const { return ax_[grid_->index(i, j)]; }
    double& ay(int i, int j) { return ay_[grid_->index(i, j)]; }
    double ay(int i, int j) const { return ay_[grid_->index(i, j)]; }

    void interp(complex z, double& out_ax, double& out_ay) const;

private:
    GridPtr grid_;
    std::vector<double> ax_, ay_;
};

// Sampling helpers for closed-form inputs.
ScalarField sample(GridPtr grid, const std::function<double(complex)>& f);
ComplexField sample_complex(GridPtr grid, const std::function<complex(complex)>& f);

// CSV dumps: header "rho,theta,value" (or value_re,value_im / a_x,a_y),
// row-major rho outer, theta inner.
void dump_csv(const ScalarField& f, const std::string& path);
void dump_csv(const ComplexField& f, const std::string& path);
void dump_csv(const OneFormField& f, const std::string& path);

}  // namespace sk2d
