#include <cmath>
#include <stdexcept>

#include "qvmc/oracles.hpp"

namespace qvmc {

namespace {

using Mat = Eigen::MatrixXcd;

// Quadratic form of the chain Hamiltonian after the Jordan-Wigner
// transformation: H = c^dag A c + 1/2 (c^dag B c^dag + h.c.) - Gamma N,
// A symmetric tridiagonal, B antisymmetric.
struct QuadraticForm {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    double constant;
};

QuadraticForm build_form(const ProblemInstance& inst, double gamma) {
    const int n = inst.n_sites;
    QuadraticForm q{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                    -gamma * n};
    for (int i = 0; i < n; ++i) q.a(i, i) = 2.0 * gamma;
    const double cl = 1.0 - gamma;
    for (const Edge& e : inst.edges) {
        q.a(e.i, e.j) = q.a(e.j, e.i) = cl * e.v;
        q.b(e.i, e.j) = cl * e.v;
        q.b(e.j, e.i) = -cl * e.v;
    }
    return q;
}

// Heisenberg equations for the correlators G = <c^dag c>, F = <c c>:
//   i dG/dt = G A - A G - F^dag B - B F
//   i dF/dt = F A + A F - B + G^T B + B G
void derivative(const QuadraticForm& q, const Mat& g, const Mat& f, Mat& dg, Mat& df) {
    const cplx mi{0.0, -1.0};
    dg = mi * (g * q.a - q.a * g - f.adjoint() * q.b - q.b * f);
    df = mi * (f * q.a + q.a * f - q.b + g.transpose() * q.b + q.b * g);
}

FermionPoint measure(const ProblemInstance& inst, double gamma, const Mat& g, const Mat& f,
                     double t) {
    const int n = inst.n_sites;
    QuadraticForm q = build_form(inst, gamma);
    cplx e{q.constant, 0.0};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e += q.a(i, j) * g(i, j);
    e += (q.b * f).trace().real();

    double kinks = 0.0;
    for (const Edge& ed : inst.edges) {
        double zz = 2.0 * (g(ed.i, ed.j) - f(ed.i, ed.j)).real();
        kinks += 1.0 - zz;
    }
    return {t, e.real() / n, kinks / (2.0 * n)};
}

}  // namespace

std::vector<FermionPoint> free_fermion_propagate(const ProblemInstance& inst,
                                                 const Schedule& sched, double dt,
                                                 int output_stride) {
    if (!inst.is_chain())
        throw std::invalid_argument("free_fermion_propagate: instance is not an open chain");
    const int n = inst.n_sites;
    const double T = sched.total_time;
    const long n_steps = std::max<long>(1, std::lround(T / dt));
    dt = T / static_cast<double>(n_steps);

    // initial state: vacuum of c (ground state of -sum sigma^x)
    Mat g = Mat::Zero(n, n), f = Mat::Zero(n, n);
    Mat kg1(n, n), kf1(n, n), kg2(n, n), kf2(n, n), kg3(n, n), kf3(n, n), kg4(n, n),
        kf4(n, n), tg(n, n), tf(n, n);

    std::vector<FermionPoint> out;
    for (long step = 0; step < n_steps; ++step) {
        const double t = step * dt;
        if (step % output_stride == 0) out.push_back(measure(inst, sched.gamma(t), g, f, t));

        QuadraticForm q1 = build_form(inst, sched.gamma(t));
        QuadraticForm q2 = build_form(inst, sched.gamma(t + 0.5 * dt));
        QuadraticForm q3 = build_form(inst, sched.gamma(t + dt));

        derivative(q1, g, f, kg1, kf1);
        tg = g + 0.5 * dt * kg1;
        tf = f + 0.5 * dt * kf1;
        derivative(q2, tg, tf, kg2, kf2);
        tg = g + 0.5 * dt * kg2;
        tf = f + 0.5 * dt * kf2;
        derivative(q2, tg, tf, kg3, kf3);
        tg = g + dt * kg3;
        tf = f + dt * kf3;
        derivative(q3, tg, tf, kg4, kf4);

        g += (dt / 6.0) * (kg1 + 2.0 * kg2 + 2.0 * kg3 + kg4);
        f += (dt / 6.0) * (kf1 + 2.0 * kf2 + 2.0 * kf3 + kf4);
    }
    out.push_back(measure(inst, 0.0, g, f, T));
    return out;
}

}  // namespace qvmc
