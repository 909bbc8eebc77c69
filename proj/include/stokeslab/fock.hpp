// Copyright 2026 The stokeslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sparse two-beam, four-mode bosonic states and polarization-basis changes.
//
// Mode order inside a beam is (first, second) = (H, V) in the stored basis.
// After a basis change the same slots hold the (+, -) output counts of the
// analyzer selected by the BasisSetting.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stokeslab/error.hpp"

namespace stokeslab {

using Complex = std::complex<double>;
using Mode2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;

enum class Beam { a, b };

inline const char *to_string(Beam beam) { return beam == Beam::a ? "a" : "b"; }

/// Fock label |n_aH, n_aV, n_bH, n_bV>.
struct Occupation {
    int a_h = 0;
    int a_v = 0;
    int b_h = 0;
    int b_v = 0;

    int n_a() const { return a_h + a_v; }
    int n_b() const { return b_h + b_v; }
    int total(Beam beam) const { return beam == Beam::a ? n_a() : n_b(); }
    int first(Beam beam) const { return beam == Beam::a ? a_h : b_h; }
    int second(Beam beam) const { return beam == Beam::a ? a_v : b_v; }
    bool valid() const { return a_h >= 0 && a_v >= 0 && b_h >= 0 && b_v >= 0; }

    friend bool operator==(const Occupation &, const Occupation &) = default;
};

/// Canonical storage order: by per-beam totals first, so that every
/// (n_a, n_b) sector is a contiguous run.
inline bool canonical_less(const Occupation &x, const Occupation &y) {
    if (x.n_a() != y.n_a()) return x.n_a() < y.n_a();
    if (x.n_b() != y.n_b()) return x.n_b() < y.n_b();
    if (x.a_h != y.a_h) return x.a_h < y.a_h;
    return x.b_h < y.b_h;
}

struct Term {
    Occupation occ;
    Complex amp;
};

/// Sparse pure state over Occupations. Terms are kept sorted in canonical
/// order with duplicates merged and |amp| < kPruneThreshold dropped.
class StateVector {
  public:
    static constexpr double kPruneThreshold = 1e-15;
    static constexpr double kDefaultNormTolerance = 1e-12;

    StateVector() = default;

    static StateVector vacuum() { return from_terms({Term{Occupation{}, Complex{1.0, 0.0}}}); }

    static StateVector basis(const Occupation &occ) { return from_terms({Term{occ, Complex{1.0, 0.0}}}); }

    static StateVector from_terms(std::vector<Term> terms) {
        for (const auto &t : terms) {
            if (!t.occ.valid()) throw InvalidArgument("negative photon count in Occupation");
            if (!std::isfinite(t.amp.real()) || !std::isfinite(t.amp.imag()))
                throw InvalidArgument("non-finite amplitude");
        }
        std::sort(terms.begin(), terms.end(),
                  [](const Term &x, const Term &y) { return canonical_less(x.occ, y.occ); });
        StateVector out;
        out.terms_.reserve(terms.size());
        for (const auto &t : terms) {
            if (!out.terms_.empty() && out.terms_.back().occ == t.occ) {
                out.terms_.back().amp += t.amp;
            } else {
                out.terms_.push_back(t);
            }
        }
        out.prune();
        return out;
    }

    std::span<const Term> terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    Complex amplitude(const Occupation &occ) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), occ,
                                   [](const Term &t, const Occupation &o) { return canonical_less(t.occ, o); });
        if (it != terms_.end() && it->occ == occ) return it->amp;
        return {};
    }

    double squared_norm() const {
        double s = 0;
        for (const auto &t : terms_) s += std::norm(t.amp);
        return s;
    }

    /// <this|other>
    Complex inner(const StateVector &other) const {
        Complex s{};
        std::size_t j = 0;
        for (const auto &t : terms_) {
            while (j < other.terms_.size() && canonical_less(other.terms_[j].occ, t.occ)) ++j;
            if (j < other.terms_.size() && other.terms_[j].occ == t.occ) s += std::conj(t.amp) * other.terms_[j].amp;
        }
        return s;
    }

    int max_photons(Beam beam) const {
        int m = 0;
        for (const auto &t : terms_) m = std::max(m, t.occ.total(beam));
        return m;
    }

    /// Truncation metadata. `truncation_n_max` is the largest per-beam photon
    /// number kept by a truncating constructor; `tail_mass` is the squared norm
    /// that was discarded.
    std::optional<int> truncation_n_max() const { return truncation_n_max_; }
    double tail_mass() const { return tail_mass_; }
    void set_truncation(int n_max, double tail_mass) {
        truncation_n_max_ = n_max;
        tail_mass_ = tail_mass;
    }

    /// Squared norm within [1 - eps - tail_mass, 1 + eps].
    bool is_normalized(double eps = kDefaultNormTolerance) const {
        const double n2 = squared_norm();
        return n2 >= 1.0 - eps - tail_mass_ && n2 <= 1.0 + eps;
    }

    StateVector scaled(Complex factor) const {
        StateVector out = *this;
        for (auto &t : out.terms_) t.amp *= factor;
        out.prune();
        return out;
    }

    StateVector normalized() const {
        const double n2 = squared_norm();
        if (n2 <= 0) throw InvalidArgument("cannot normalize the zero vector");
        StateVector out = scaled(1.0 / std::sqrt(n2));
        out.truncation_n_max_ = truncation_n_max_;
        return out;
    }

    friend StateVector operator+(const StateVector &x, const StateVector &y) {
        std::vector<Term> all(x.terms_.begin(), x.terms_.end());
        all.insert(all.end(), y.terms_.begin(), y.terms_.end());
        return from_terms(std::move(all));
    }

  private:
    void prune() {
        std::erase_if(terms_, [](const Term &t) { return std::abs(t.amp) < kPruneThreshold; });
    }

    std::vector<Term> terms_;
    std::optional<int> truncation_n_max_;
    double tail_mass_ = 0.0;
};

inline void require_normalized(const StateVector &state, const char *where,
                               double eps = StateVector::kDefaultNormTolerance) {
    if (!state.is_normalized(eps)) {
        throw InvalidArgument(std::string(where) + ": state is not normalized (squared norm " +
                              std::to_string(state.squared_norm()) + ")");
    }
}

// ---------------------------------------------------------------------------
// Single-beam states (building blocks for product states)

struct BeamTerm {
    int h = 0;
    int v = 0;
    Complex amp;
};

class BeamState {
  public:
    static BeamState fock(int h, int v) { return from_terms({BeamTerm{h, v, Complex{1.0, 0.0}}}); }

    static BeamState from_terms(std::vector<BeamTerm> terms) {
        std::sort(terms.begin(), terms.end(), [](const BeamTerm &x, const BeamTerm &y) {
            return std::pair(x.h + x.v, x.h) < std::pair(y.h + y.v, y.h);
        });
        BeamState out;
        for (const auto &t : terms) {
            if (t.h < 0 || t.v < 0) throw InvalidArgument("negative photon count in BeamState");
            if (!out.terms_.empty() && out.terms_.back().h == t.h && out.terms_.back().v == t.v) {
                out.terms_.back().amp += t.amp;
            } else {
                out.terms_.push_back(t);
            }
        }
        std::erase_if(out.terms_, [](const BeamTerm &t) { return std::abs(t.amp) < StateVector::kPruneThreshold; });
        return out;
    }

    /// Two-mode coherent state |alpha_h>|alpha_v> truncated to total photon
    /// number <= n_max and renormalized.
    static BeamState coherent(Complex alpha_h, Complex alpha_v, int n_max) {
        std::vector<BeamTerm> terms;
        for (int n = 0; n <= n_max; ++n) {
            for (int h = 0; h <= n; ++h) {
                const int v = n - h;
                const Complex amp = std::pow(alpha_h, h) * std::pow(alpha_v, v) /
                                    std::sqrt(std::tgamma(h + 1.0) * std::tgamma(v + 1.0));
                terms.push_back({h, v, amp});
            }
        }
        return from_terms(std::move(terms)).normalized();
    }

    std::span<const BeamTerm> terms() const { return terms_; }

    double squared_norm() const {
        double s = 0;
        for (const auto &t : terms_) s += std::norm(t.amp);
        return s;
    }

    BeamState normalized() const {
        const double n = std::sqrt(squared_norm());
        if (n <= 0) throw InvalidArgument("cannot normalize the zero beam state");
        BeamState out = *this;
        for (auto &t : out.terms_) t.amp /= n;
        return out;
    }

  private:
    std::vector<BeamTerm> terms_;
};

// ---------------------------------------------------------------------------
// Polarization settings

/// Pauli basis in the project convention: sigma_0 = I, sigma_1 = diag(1,-1)
/// (H/V), sigma_2 = [[0,1],[1,0]] (D/A), sigma_3 = [[0,-i],[i,0]] (R/L).
inline Mode2 pauli(int k) {
    const Complex i{0.0, 1.0};
    Mode2 m;
    switch (k) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 1, 0, 0, -1; break;
        case 2: m << 0, 1, 1, 0; break;
        case 3: m << 0, -i, i, 0; break;
        default: throw InvalidArgument("Pauli index must be 0..3");
    }
    return m;
}

/// A polarization analyzer: the 2x2 unitary U with (a_+, a_-)^T = U (a_H, a_V)^T
/// and the unit Poincare vector m such that n_+ - n_- = A^dagger (m.sigma) A.
class BasisSetting {
  public:
    static constexpr double kTolerance = 1e-12;

    /// Stored-basis analyzer (H/V).
    BasisSetting() : BasisSetting(1) {}

    static BasisSetting index(int i) { return BasisSetting(i); }

    static BasisSetting direction(const Vec3 &m) {
        if (!m.allFinite() || std::abs(m.norm() - 1.0) > kTolerance)
            throw InvalidArgument("BasisSetting direction must be a unit vector");
        // +1 eigenvector of m.sigma; pick the better-conditioned of two forms.
        Eigen::Vector2cd plus;
        if (m(0) >= 0) {
            plus << 1.0 + m(0), Complex(m(1), m(2));
        } else {
            plus << Complex(m(1), -m(2)), 1.0 - m(0);
        }
        plus.normalize();
        Eigen::Vector2cd minus;
        minus << -std::conj(plus(1)), std::conj(plus(0));
        Mode2 u;
        u.row(0) = plus.adjoint();
        u.row(1) = minus.adjoint();
        return BasisSetting(u, m, std::nullopt);
    }

    static BasisSetting from_unitary(const Mode2 &u) {
        if (!u.allFinite() || ((u.adjoint() * u) - Mode2::Identity()).cwiseAbs().maxCoeff() > kTolerance)
            throw InvalidArgument("mode-mixing matrix is not unitary");
        return BasisSetting(u, direction_of(u), std::nullopt);
    }

    const Mode2 &unitary() const { return u_; }
    const Vec3 &direction() const { return m_; }
    std::optional<int> index() const { return index_; }
    bool is_identity() const { return (u_ - Mode2::Identity()).cwiseAbs().maxCoeff() == 0.0; }

    BasisSetting inverse() const { return BasisSetting(u_.adjoint(), direction_of(u_.adjoint()), std::nullopt); }

    std::string label() const {
        if (index_) return std::to_string(*index_);
        char buf[96];
        std::snprintf(buf, sizeof buf, "m(%.6g;%.6g;%.6g)", m_(0), m_(1), m_(2));
        return buf;
    }

  private:
    explicit BasisSetting(int i) : index_(i) {
        const Complex im{0.0, 1.0};
        const double r = 1.0 / std::sqrt(2.0);
        switch (i) {
            case 1:
                u_ = Mode2::Identity();
                m_ = Vec3(1, 0, 0);
                break;
            case 2:
                u_ << r, r, r, -r;
                m_ = Vec3(0, 1, 0);
                break;
            case 3:
                u_ << r, -im * r, r, im * r;
                m_ = Vec3(0, 0, 1);
                break;
            default: throw InvalidArgument("BasisSetting index must be 1, 2 or 3");
        }
    }

    BasisSetting(const Mode2 &u, const Vec3 &m, std::optional<int> idx) : u_(u), m_(m), index_(idx) {}

    static Vec3 direction_of(const Mode2 &u) {
        const Eigen::Vector2cd plus = u.row(0).adjoint();
        Vec3 m;
        for (int k = 1; k <= 3; ++k) m(k - 1) = (plus.adjoint() * pauli(k) * plus)(0, 0).real();
        return m;
    }

    Mode2 u_;
    Vec3 m_;
    std::optional<int> index_;
};

// ---------------------------------------------------------------------------
// Per-sector representation of a mode-mixing unitary.

/// Matrix elements R^{(n)}(r, p) = <r, n-r|_new |p, n-p>_old of the n-photon
/// representation of U (the spin-n/2 block under the Schwinger map), with
/// a_j^dag = sum_i U_ij b_i^dag.
///
/// U is factored as diag(e^{i out}) O diag(e^{i in}) with O a real rotation,
/// so R^{(n)} = diag(out phases) d^{(n)} diag(in phases) with d^{(n)} real.
class ModeMixer {
  public:
    static constexpr int kCachedSectors = 96;

    explicit ModeMixer(const Mode2 &u) {
        const double c = std::min(1.0, std::abs(u(0, 0)));
        const double s = std::min(1.0, std::abs(u(1, 0)));
        if (s == 0.0) {
            out_ = {std::arg(u(0, 0)), std::arg(u(1, 1))};
            in_ = {0.0, 0.0};
        } else if (c == 0.0) {
            out_ = {std::arg(-u(0, 1)), std::arg(u(1, 0))};
            in_ = {0.0, 0.0};
        } else {
            out_ = {std::arg(u(0, 0)), std::arg(u(1, 0))};
            in_ = {0.0, std::arg(-u(0, 1)) - out_[0]};
        }
        o_ << c, -s, s, c;
        const Mode2 rebuilt = Eigen::Vector2cd(std::polar(1.0, out_[0]), std::polar(1.0, out_[1])).asDiagonal() *
                              o_.cast<Complex>() *
                              Eigen::Vector2cd(std::polar(1.0, in_[0]), std::polar(1.0, in_[1])).asDiagonal();
        if ((rebuilt - u).cwiseAbs().maxCoeff() > 1e-10) throw InvalidArgument("ModeMixer: matrix is not unitary");
        Eigen::MatrixXd zero(1, 1);
        zero(0, 0) = 1.0;
        cache_.push_back(std::move(zero));
    }

    /// Real core d^{(n)}.
    const Eigen::MatrixXd &real_sector(int n) {
        if (n < 0) throw InvalidArgument("negative sector order");
        while (static_cast<int>(cache_.size()) <= std::min(n, kCachedSectors))
            cache_.push_back(next(cache_.back(), static_cast<int>(cache_.size())));
        if (n < static_cast<int>(cache_.size())) return cache_[static_cast<std::size_t>(n)];
        if (rolling_n_ < 0 || rolling_n_ > n) {
            rolling_ = cache_.back();
            rolling_n_ = static_cast<int>(cache_.size()) - 1;
        }
        while (rolling_n_ < n) {
            rolling_ = next(rolling_, rolling_n_ + 1);
            ++rolling_n_;
        }
        return rolling_;
    }

    /// Phase of input count p (of n) and of output count r (of n).
    Complex in_phase(int p, int n) const { return std::polar(1.0, p * in_[0] + (n - p) * in_[1]); }
    Complex out_phase(int r, int n) const { return std::polar(1.0, r * out_[0] + (n - r) * out_[1]); }

    /// Full R^{(n)}.
    Eigen::MatrixXcd sector(int n) {
        const Eigen::MatrixXd &d = real_sector(n);
        Eigen::MatrixXcd r = d.cast<Complex>();
        for (int col = 0; col <= n; ++col)
            for (int row = 0; row <= n; ++row) r(row, col) *= out_phase(row, n) * in_phase(col, n);
        return r;
    }

  private:
    // d_n = E^T (d_{n-1} (x) O) E with E the isometric embedding of the
    // n-photon space into (n-1 photons) (x) (1 photon),
    // E|p, n-p> = sqrt(p/n) |p-1, n-p>|1> + sqrt((n-p)/n) |p, n-p-1>|2>.
    // Every step is a contraction, so rounding errors grow only linearly in n.
    Eigen::MatrixXd next(const Eigen::MatrixXd &prev, int n) const {
        std::vector<double> alpha(static_cast<std::size_t>(n) + 1), beta(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            alpha[static_cast<std::size_t>(k)] = std::sqrt(static_cast<double>(k) / n);
            beta[static_cast<std::size_t>(k)] = std::sqrt(static_cast<double>(n - k) / n);
        }
        Eigen::MatrixXd out(n + 1, n + 1);
        for (int p = 0; p <= n; ++p) {
            const double ap = alpha[static_cast<std::size_t>(p)];
            const double bp = beta[static_cast<std::size_t>(p)];
            for (int r = 0; r <= n; ++r) {
                double v = 0;
                if (r >= 1) {
                    double w = 0;
                    if (p >= 1) w += ap * o_(0, 0) * prev(r - 1, p - 1);
                    if (p <= n - 1) w += bp * o_(0, 1) * prev(r - 1, p);
                    v += alpha[static_cast<std::size_t>(r)] * w;
                }
                if (r <= n - 1) {
                    double w = 0;
                    if (p >= 1) w += ap * o_(1, 0) * prev(r, p - 1);
                    if (p <= n - 1) w += bp * o_(1, 1) * prev(r, p);
                    v += beta[static_cast<std::size_t>(r)] * w;
                }
                out(r, p) = v;
            }
        }
        return out;
    }

    Eigen::Matrix2d o_;
    std::array<double, 2> out_{};
    std::array<double, 2> in_{};
    std::vector<Eigen::MatrixXd> cache_;
    Eigen::MatrixXd rolling_;
    int rolling_n_ = -1;
};

// ---------------------------------------------------------------------------
// Sectors

struct SectorKey {
    int n_a = 0;
    int n_b = 0;
    friend bool operator==(const SectorKey &, const SectorKey &) = default;
};

struct Sector {
    SectorKey key;
    StateVector component;
    double weight = 0.0;
};

/// Splits a state into its fixed-(n_a, n_b) components. Weights are the
/// squared norms of the components; their sum is the squared norm of the state.
inline std::vector<Sector> sector_decompose(const StateVector &state) {
    std::vector<Sector> out;
    const auto terms = state.terms();
    std::size_t i = 0;
    while (i < terms.size()) {
        const SectorKey key{terms[i].occ.n_a(), terms[i].occ.n_b()};
        std::size_t j = i;
        while (j < terms.size() && terms[j].occ.n_a() == key.n_a && terms[j].occ.n_b() == key.n_b) ++j;
        std::vector<Term> part(terms.begin() + static_cast<std::ptrdiff_t>(i),
                               terms.begin() + static_cast<std::ptrdiff_t>(j));
        StateVector component = StateVector::from_terms(std::move(part));
        const double w = component.squared_norm();
        out.push_back(Sector{key, std::move(component), w});
        i = j;
    }
    return out;
}

namespace detail {

/// Calls fn(key, block) for each sector, where block(p, q) is the amplitude of
/// |p, n_a-p>_a |q, n_b-q>_b after rotating beam a by `mix_a` and beam b by
/// `mix_b` (nullptr = leave in the stored basis). With `output_phases` false
/// the rows and columns are each off by a unit phase, which leaves every
/// |block(p, q)|^2 unchanged.
template <class Fn>
void for_each_rotated_block(const StateVector &state, ModeMixer *mix_a, ModeMixer *mix_b, Fn &&fn,
                            bool output_phases = true) {
    const auto terms = state.terms();
    std::size_t i = 0;
    Eigen::MatrixXcd block;
    Eigen::MatrixXd re, im, tmp;
    std::vector<Complex> coef;
    while (i < terms.size()) {
        const SectorKey key{terms[i].occ.n_a(), terms[i].occ.n_b()};
        std::size_t j = i;
        while (j < terms.size() && terms[j].occ.n_a() == key.n_a && terms[j].occ.n_b() == key.n_b) ++j;
        const int rows = key.n_a + 1;
        const int cols = key.n_b + 1;

        // Input phases, then split off a common phase so that real-valued
        // blocks (up to that phase) take the real-arithmetic path.
        coef.resize(j - i);
        double peak = 0;
        Complex common{1.0, 0.0};
        for (std::size_t k = i; k < j; ++k) {
            const Occupation &o = terms[k].occ;
            Complex c = terms[k].amp;
            if (mix_a != nullptr) c *= mix_a->in_phase(o.a_h, key.n_a);
            if (mix_b != nullptr) c *= mix_b->in_phase(o.b_h, key.n_b);
            coef[k - i] = c;
            if (std::abs(c) > peak) {
                peak = std::abs(c);
                common = c / peak;
            }
        }
        bool real = true;
        for (Complex &c : coef) {
            c *= std::conj(common);
            if (std::abs(c.imag()) > 1e-15 * peak) real = false;
        }

        re.setZero(rows, cols);
        if (!real) im.setZero(rows, cols);
        for (std::size_t k = i; k < j; ++k) {
            const Occupation &o = terms[k].occ;
            const Complex c = coef[k - i];
            if (mix_a != nullptr) {
                const Eigen::MatrixXd &da = mix_a->real_sector(key.n_a);
                re.col(o.b_h) += c.real() * da.col(o.a_h);
                if (!real) im.col(o.b_h) += c.imag() * da.col(o.a_h);
            } else {
                re(o.a_h, o.b_h) = c.real();
                if (!real) im(o.a_h, o.b_h) = c.imag();
            }
        }
        if (mix_b != nullptr) {
            const Eigen::MatrixXd &db = mix_b->real_sector(key.n_b);
            tmp.noalias() = re * db.transpose();
            re.swap(tmp);
            if (!real) {
                tmp.noalias() = im * db.transpose();
                im.swap(tmp);
            }
        }
        if (real) {
            block = common * re.cast<Complex>();
        } else {
            block.resize(rows, cols);
            block.real() = re;
            block.imag() = im;
            block *= common;
        }
        if (output_phases) {
            for (int q = 0; q < cols; ++q) {
                const Complex pb = mix_b != nullptr ? mix_b->out_phase(q, key.n_b) : Complex{1.0, 0.0};
                for (int p = 0; p < rows; ++p) {
                    const Complex pa = mix_a != nullptr ? mix_a->out_phase(p, key.n_a) : Complex{1.0, 0.0};
                    block(p, q) *= pa * pb;
                }
            }
        }
        fn(key, static_cast<const Eigen::MatrixXcd &>(block));
        i = j;
    }
}

}  // namespace detail

/// Expresses the state in the analyzer basis of `setting` on one beam. The
/// output Occupation slots (first, second) hold the (+, -) mode counts.
inline StateVector rotate_beam(const StateVector &state, Beam beam, const BasisSetting &setting) {
    require_normalized(state, "rotate_beam");
    ModeMixer mixer(setting.unitary());
    std::vector<Term> out;
    out.reserve(state.size());
    detail::for_each_rotated_block(state, beam == Beam::a ? &mixer : nullptr, beam == Beam::b ? &mixer : nullptr,
                                   [&](const SectorKey &key, const Eigen::MatrixXcd &block) {
                                       for (int q = 0; q <= key.n_b; ++q) {
                                           for (int p = 0; p <= key.n_a; ++p) {
                                               const Complex amp = block(p, q);
                                               if (std::abs(amp) < StateVector::kPruneThreshold) continue;
                                               out.push_back(Term{Occupation{p, key.n_a - p, q, key.n_b - q}, amp});
                                           }
                                       }
                                   });
    StateVector rotated = StateVector::from_terms(std::move(out));
    if (state.truncation_n_max()) rotated.set_truncation(*state.truncation_n_max(), state.tail_mass());
    return rotated;
}

}  // namespace stokeslab
