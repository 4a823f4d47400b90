// Thin adaptive-quadrature wrapper over GSL for C++ callables.
#pragma once

#include <functional>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace fadesched::detail {

inline void gsl_quiet() {
    static const bool done = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)done;
}

struct QuadWorkspace {
    gsl_integration_workspace* ws;
    explicit QuadWorkspace(std::size_t n) : ws(gsl_integration_workspace_alloc(n)) {}
    ~QuadWorkspace() { gsl_integration_workspace_free(ws); }
    QuadWorkspace(const QuadWorkspace&) = delete;
    QuadWorkspace& operator=(const QuadWorkspace&) = delete;
};

inline double quad_call(double x, void* p) {
    return (*static_cast<const std::function<double(double)>*>(p))(x);
}

/// Adaptive integral over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, double rel_tol = 1e-10) {
    gsl_quiet();
    QuadWorkspace w(4096);
    gsl_function gf{&quad_call, const_cast<std::function<double(double)>*>(&f)};
    double result = 0.0, err = 0.0;
    const int status =
        gsl_integration_qags(&gf, a, b, abs_tol, rel_tol, 4096, w.ws, &result, &err);
    if (status != GSL_SUCCESS && status != GSL_EROUND) {
        throw std::runtime_error("quadrature failed on finite interval");
    }
    return result;
}

/// Adaptive integral over [a, +inf).
inline double integrate_to_inf(const std::function<double(double)>& f, double a,
                               double abs_tol = 1e-12, double rel_tol = 1e-10) {
    gsl_quiet();
    QuadWorkspace w(4096);
    gsl_function gf{&quad_call, const_cast<std::function<double(double)>*>(&f)};
    double result = 0.0, err = 0.0;
    const int status =
        gsl_integration_qagiu(&gf, a, abs_tol, rel_tol, 4096, w.ws, &result, &err);
    if (status != GSL_SUCCESS && status != GSL_EROUND) {
        throw std::runtime_error("quadrature failed on infinite interval");
    }
    return result;
}

} // namespace fadesched::detail
