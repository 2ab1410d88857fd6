#include "netvol/witnesses.hpp"

#include <cmath>
#include <stdexcept>

namespace netvol::witness {

std::string to_string(WitnessId w) {
    switch (w) {
        case WitnessId::Finner: return "finner";
        case WitnessId::Entropic: return "entropic";
        case WitnessId::Covariance: return "covariance";
    }
    return "?";
}

double shannon_entropy(std::span<const double> p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    return h;
}

namespace {

void check_triangle_shape(const Behavior& p) {
    p.validate(1e-9);
    if (p.spec.setting_count() != 1)
        throw std::domain_error("triangle witnesses expect an unconditional p(a,b,c)");
}

constexpr double kViolationTol = 1e-12;

}  // namespace

WitnessReport finner_check(const Behavior& p) {
    check_triangle_shape(p);
    auto pa = marginal(p, PartyA), pb = marginal(p, PartyB), pc = marginal(p, PartyC);
    WitnessReport r;
    r.witness_id = WitnessId::Finner;
    r.margin = -1.0;
    for (int a = 0; a < p.spec.card_a; ++a)
        for (int b = 0; b < p.spec.card_b; ++b)
            for (int c = 0; c < p.spec.card_c; ++c) {
                double m = p.at(a, b, c) - std::sqrt(pa[static_cast<size_t>(a)] *
                                                     pb[static_cast<size_t>(b)] *
                                                     pc[static_cast<size_t>(c)]);
                r.margin = std::max(r.margin, m);
            }
    r.violated = r.margin > kViolationTol;
    r.details = {r.margin, 0.0, 0.0};
    return r;
}

WitnessReport entropic_check(const Behavior& p) {
    check_triangle_shape(p);
    double ha = shannon_entropy(marginal(p, PartyA));
    double hb = shannon_entropy(marginal(p, PartyB));
    double hc = shannon_entropy(marginal(p, PartyC));
    double hab = shannon_entropy(marginal(p, PartyA | PartyB));
    double hac = shannon_entropy(marginal(p, PartyA | PartyC));
    double hbc = shannon_entropy(marginal(p, PartyB | PartyC));
    WitnessReport r;
    r.witness_id = WitnessId::Entropic;
    // I(X:Y) + I(X:Z) - H(X) for pivots X = A, B, C.
    r.details[0] = ha + hb + hc - hab - hac;
    r.details[1] = ha + hb + hc - hab - hbc;
    r.details[2] = ha + hb + hc - hac - hbc;
    r.margin = std::max({r.details[0], r.details[1], r.details[2]});
    r.violated = r.margin > kViolationTol;
    return r;
}

WitnessReport covariance_check(const Behavior& p) {
    check_triangle_shape(p);
    if (p.spec.card_a != 2 || p.spec.card_b != 2 || p.spec.card_c != 2)
        throw std::domain_error("covariance test is restricted to binary outcomes");

    // +-1 encoding: <X> and pairwise covariances.
    double ea = 0, eb = 0, ec = 0, eab = 0, ebc = 0, eac = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                double w = p.at(a, b, c);
                double sa = a ? -1.0 : 1.0, sb = b ? -1.0 : 1.0, sc = c ? -1.0 : 1.0;
                ea += sa * w;
                eb += sb * w;
                ec += sc * w;
                eab += sa * sb * w;
                ebc += sb * sc * w;
                eac += sa * sc * w;
            }
    double va = std::max(0.0, 1.0 - ea * ea);
    double vb = std::max(0.0, 1.0 - eb * eb);
    double vc = std::max(0.0, 1.0 - ec * ec);
    double cab = eab - ea * eb, cbc = ebc - eb * ec, cac = eac - ea * ec;
    double cab2 = cab * cab, cbc2 = cbc * cbc, cac2 = cac * cac;

    WitnessReport r;
    r.witness_id = WitnessId::Covariance;

    // Feasible range of yL: xL = cab^2/yL must fit in Var(A), and
    // zG = cbc^2/(Var(B)-yL) must fit in Var(C).
    double ylo = 0.0, yhi = vb;
    if (cab2 > 0.0) {
        if (va <= 0.0) {
            r.margin = std::max(cab2, cac2);
            r.violated = true;
            r.details = {r.margin, 0.0, 0.0};
            return r;
        }
        ylo = cab2 / va;
    }
    if (cbc2 > 0.0) {
        if (vc <= 0.0) {
            r.margin = std::max(cbc2, cac2);
            r.violated = true;
            r.details = {r.margin, 0.0, 0.0};
            return r;
        }
        yhi = vb - cbc2 / vc;
    }
    if (ylo > yhi) {
        r.margin = std::max(cac2, ylo - yhi);
        r.violated = true;
        r.details = {r.margin, ylo, yhi};
        return r;
    }

    // Maximize (Var(A) - cab^2/y)(Var(C) - cbc^2/(Var(B)-y)) over [ylo,yhi];
    // the product of the two available slacks is unimodal there.
    auto avail = [&](double y) {
        double xm = va - (cab2 > 0.0 ? cab2 / std::max(y, 1e-300) : 0.0);
        double zm = vc - (cbc2 > 0.0 ? cbc2 / std::max(vb - y, 1e-300) : 0.0);
        return std::max(xm, 0.0) * std::max(zm, 0.0);
    };
    double lo = ylo, hi = yhi;
    for (int it = 0; it < 200; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (avail(m1) < avail(m2))
            lo = m1;
        else
            hi = m2;
    }
    double fmax = std::max({avail(ylo), avail(0.5 * (lo + hi)), avail(yhi)});
    r.margin = cac2 - fmax;
    r.violated = r.margin > kViolationTol;
    r.details = {r.margin, ylo, yhi};
    return r;
}

}  // namespace netvol::witness
