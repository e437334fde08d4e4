#include "rasm/markov.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rasm/rational.hpp"

namespace rasm {

namespace {

FormalSum rate_sum(const TransitionSet& ts) {
    FormalSum fs;
    for (const auto& wr : ts.transitions) {
        if (!(wr.weight > 0))
            throw std::invalid_argument("transition set: base rate of '" + wr.rule.name +
                                        "' must be positive");
        fs.add(wr.weight, wr.rule);
    }
    return fs;
}

std::string fifteen_digits(const Rat& p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", rat_to_double(p));
    return buf;
}

}  // namespace

SparseOperator build_generator(const TransitionSet& ts,
                               std::shared_ptr<const StateBasis> basis) {
    SparseOperator h = represent(rate_sum(ts), std::move(basis), ts.semantics);
    for (int j = 0; j < h.basis->size(); ++j) {
        Rat s = h.column_sum(j);
        if (s != 0) h.cols[j][j] -= s;
        if (h.cols[j].count(j) && h.cols[j][j] == 0) h.cols[j].erase(j);
    }
    return h;
}

SparseOperator embedded_dtmc(const TransitionSet& ts,
                             std::shared_ptr<const StateBasis> basis,
                             bool absorbing_self_loop) {
    SparseOperator d = represent(rate_sum(ts), std::move(basis), ts.semantics);
    for (int j = 0; j < d.basis->size(); ++j) {
        auto& col = d.cols[j];
        col.erase(j);  // self-derivations are invisible to the jump chain
        Rat exit = 0;
        for (const auto& [row, v] : col) exit += v;
        if (exit == 0) {
            // no moves inside the basis: absorbing if genuinely complete,
            // otherwise the column stays empty and stays flagged
            if (d.col_complete[j] && absorbing_self_loop) col[j] = 1;
            continue;
        }
        for (auto& [row, v] : col) v /= exit;
    }
    return d;
}

StateDistribution dtmc_propagate(const SparseOperator& dtmc, const TypedGraph& x0, int n) {
    if (n < 0) throw std::invalid_argument("dtmc_propagate: negative step count");
    const StateBasis& b = *dtmc.basis;
    int start = b.find(canonical_key(x0));
    if (start < 0) throw std::invalid_argument("dtmc_propagate: initial state not in basis");

    std::map<int, Rat> mass = {{start, Rat(1)}};
    for (int step = 0; step < n; ++step) {
        std::map<int, Rat> next;
        for (const auto& [j, p] : mass) {
            if (!dtmc.col_complete[j])
                throw std::runtime_error(
                    "dtmc_propagate: truncated data: probability mass reached incomplete "
                    "column " +
                    std::to_string(j) + " at step " + std::to_string(step));
            for (const auto& [row, v] : dtmc.cols[j]) next[row] += p * v;
        }
        mass = std::move(next);
    }

    StateDistribution out;
    for (const auto& [j, p] : mass)
        if (p != 0) out[b.keys[j]] = p;
    return out;
}

std::map<CanonicalKey, Rat> absorption_probabilities(const SparseOperator& dtmc,
                                                     const CanonicalKey& target) {
    const StateBasis& b = *dtmc.basis;
    int t = b.find(target);
    if (t < 0) throw std::invalid_argument("absorption: target not in basis");
    int m = b.size();
    for (int j = 0; j < m; ++j)
        if (!dtmc.col_complete[j])
            throw std::runtime_error("absorption: truncated data: column " + std::to_string(j) +
                                     " is incomplete");

    auto is_absorbing = [&](int j) {
        const auto& col = dtmc.cols[j];
        return col.empty() || (col.size() == 1 && col.count(j) && col.at(j) == Rat(1));
    };

    // rows: p_t = 1; p_x = 0 for other absorbing x; p_x - sum_y d(y,x) p_y = 0
    std::vector<std::vector<Rat>> a(m, std::vector<Rat>(m + 1, Rat(0)));
    for (int x = 0; x < m; ++x) {
        if (x == t) {
            a[x][x] = 1;
            a[x][m] = 1;
        } else if (is_absorbing(x)) {
            a[x][x] = 1;
        } else {
            a[x][x] = 1;
            for (const auto& [y, v] : dtmc.cols[x]) a[x][y] -= v;
        }
    }

    for (int col = 0, row = 0; col < m && row < m; ++col) {
        int pivot = -1;
        for (int r = row; r < m; ++r)
            if (a[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0)
            throw std::runtime_error("absorption: singular system (a recurrent class cannot "
                                     "reach any absorbing state)");
        std::swap(a[row], a[pivot]);
        Rat inv = a[row][col];
        for (int c = col; c <= m; ++c) a[row][c] /= inv;
        for (int r = 0; r < m; ++r) {
            if (r == row || a[r][col] == 0) continue;
            Rat f = a[r][col];
            for (int c = col; c <= m; ++c) a[r][c] -= f * a[row][c];
        }
        ++row;
    }

    std::map<CanonicalKey, Rat> out;
    for (int x = 0; x < m; ++x) out[b.keys[x]] = a[x][m];
    return out;
}

Trajectory ssa_run(const TransitionSet& ts, const TypedGraph& x0, const SsaOptions& opt,
                   std::uint64_t seed, const std::vector<Observable>& tracked) {
    if (opt.max_steps < 0 && !(opt.max_time < std::numeric_limits<double>::infinity()))
        throw std::invalid_argument("ssa_run: either max_time or max_steps must bound the run");
    for (const auto& wr : ts.transitions)
        if (!(wr.weight > 0))
            throw std::invalid_argument("ssa_run: base rate of '" + wr.rule.name +
                                        "' must be positive");

    Trajectory tr;
    tr.seed = seed;
    CounterRng rng(seed);
    TypedGraph x = x0;
    double t = 0;
    long steps = 0;

    auto record = [&]() {
        TrajectoryPoint pt;
        pt.t = t;
        pt.state = canonical_key(x);
        for (const auto& obs : tracked) pt.counts.push_back(observable_count(obs, x));
        tr.points.push_back(std::move(pt));
    };
    record();

    while (opt.max_steps < 0 || steps < opt.max_steps) {
        std::vector<std::vector<Morphism>> matches(ts.transitions.size());
        double lambda = 0;
        for (std::size_t j = 0; j < ts.transitions.size(); ++j) {
            matches[j] = admissible_matches(ts.transitions[j].rule, x, ts.semantics);
            lambda += rat_to_double(ts.transitions[j].weight) * matches[j].size();
        }
        if (lambda <= 0) {
            tr.absorbed = true;
            break;
        }

        double dt;
        do {
            dt = rng.exponential(lambda);
        } while (!(dt > 0));
        if (t + dt > opt.max_time) break;
        t += dt;

        // pick a (rule, match) pair with probability rate / lambda
        double mark = rng.uniform() * lambda;
        double acc = 0;
        std::size_t rule_idx = 0;
        int match_idx = 0;
        bool chosen = false;
        for (std::size_t j = 0; j < ts.transitions.size() && !chosen; ++j) {
            double rate = rat_to_double(ts.transitions[j].weight);
            for (std::size_t i = 0; i < matches[j].size(); ++i) {
                acc += rate;
                if (acc >= mark) {
                    rule_idx = j;
                    match_idx = static_cast<int>(i);
                    chosen = true;
                    break;
                }
            }
        }
        if (!chosen) {  // float round-off on the last slot
            for (std::size_t j = ts.transitions.size(); j-- > 0;)
                if (!matches[j].empty()) {
                    rule_idx = j;
                    match_idx = static_cast<int>(matches[j].size()) - 1;
                    break;
                }
        }

        x = apply(ts.transitions[rule_idx].rule, x, matches[rule_idx][match_idx], ts.semantics)
                .result;
        ++steps;
        record();
    }
    return tr;
}

void export_trajectory_jsonl(const Trajectory& tr, const std::vector<std::string>& names,
                             std::ostream& os) {
    for (const auto& pt : tr.points) {
        nlohmann::json row;
        row["t"] = pt.t;
        row["state"] = hex_key(pt.state);
        nlohmann::json counts = nlohmann::json::object();
        for (std::size_t i = 0; i < pt.counts.size(); ++i) {
            std::string name = i < names.size() ? names[i] : "obs" + std::to_string(i);
            counts[name] = pt.counts[i].get_si();
        }
        row["counts"] = std::move(counts);
        os << row.dump() << '\n';
    }
}

Rat AffineForm::eval(const CountVector& n) const {
    if (n.size() != coeffs.size())
        throw std::invalid_argument("affine form: count vector has wrong arity");
    Rat v = constant;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 0) v += coeffs[i] * Rat(n[i]);
    return v;
}

namespace {

// Solves rows * x = b exactly with free coefficients zeroed; pivot columns
// are chosen left to right.  Returns false when the system is inconsistent,
// filling witness with the offending row index.
bool affine_fit(const std::vector<CountVector>& points, const std::vector<Rat>& b,
                AffineForm& out, int* witness) {
    std::size_t rows = points.size();
    std::size_t cols = points.empty() ? 1 : points[0].size() + 1;
    std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(cols + 1, Rat(0)));
    for (std::size_t r = 0; r < rows; ++r) {
        a[r][0] = 1;
        for (std::size_t c = 1; c < cols; ++c) a[r][c] = Rat(points[r][c - 1]);
        a[r][cols] = b[r];
    }

    std::vector<int> pivot_of_col(cols, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t p = row;
        while (p < rows && a[p][col] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[row], a[p]);
        Rat inv = a[row][col];
        for (std::size_t c = col; c <= cols; ++c) a[row][c] /= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || a[r][col] == 0) continue;
            Rat f = a[r][col];
            for (std::size_t c = col; c <= cols; ++c) a[r][c] -= f * a[row][c];
        }
        pivot_of_col[col] = static_cast<int>(row);
        ++row;
    }

    std::vector<Rat> x(cols, Rat(0));
    for (std::size_t col = 0; col < cols; ++col)
        if (pivot_of_col[col] >= 0) x[col] = a[pivot_of_col[col]][cols];

    // residual check doubles as the inconsistency detector
    for (std::size_t r = 0; r < rows; ++r) {
        Rat v = x[0];
        for (std::size_t c = 1; c < cols; ++c) v += x[c] * Rat(points[r][c - 1]);
        if (v != b[r]) {
            if (witness) *witness = static_cast<int>(r);
            return false;
        }
    }

    out.constant = x[0];
    out.coeffs.assign(x.begin() + 1, x.end());
    return true;
}

CountVector to_longs(const std::vector<Int>& v) {
    CountVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_si();
    return out;
}

}  // namespace

MarginalGenerator derive_marginal_generator(const GenerationTable& table,
                                            const CountTable& counts,
                                            const TransitionSet& ts) {
    if (table.depth() < 4)
        throw std::invalid_argument("derive_marginal_generator: table depth must be >= 4");

    std::vector<CountVector> points;
    std::vector<CanonicalKey> state_keys;
    std::vector<Rat> activity;
    std::map<CountVector, std::vector<Rat>> class_weights;  // delta -> per-state multiplicity

    for (int n = 0; n < table.depth(); ++n) {
        for (const auto& [key, entry] : table.generations[n]) {
            CountVector cx = to_longs(counts.at(key));
            std::size_t s = points.size();
            points.push_back(cx);
            state_keys.push_back(key);
            activity.push_back(0);
            for (auto& [delta, column] : class_weights) column.resize(points.size(), Rat(0));

            for (const auto& [ykey, cls] : derive_all(ts.transitions, entry.representative,
                                                      ts.semantics)) {
                auto it = counts.find(ykey);
                if (it == counts.end())
                    throw std::invalid_argument(
                        "derive_marginal_generator: a one-step result is missing from the "
                        "count table (rules and table disagree)");
                CountVector cy = to_longs(it->second);
                CountVector delta(cx.size());
                for (std::size_t i = 0; i < cx.size(); ++i) delta[i] = cy[i] - cx[i];
                auto& column = class_weights[delta];
                column.resize(points.size(), Rat(0));
                column[s] += cls.weight;
                activity[s] += cls.weight;
            }
        }
    }

    MarginalGenerator mg;
    for (const auto& [delta, column] : class_weights) {
        MarginalTransition tr;
        tr.delta = delta;
        int witness = -1;
        if (!affine_fit(points, column, tr.weight, &witness)) {
            std::ostringstream msg;
            msg << "derive_marginal_generator: multiplicity of count shift (";
            for (std::size_t i = 0; i < delta.size(); ++i)
                msg << (i ? "," : "") << delta[i];
            msg << ") is not an affine function of the counts; witness state "
                << hex_key(state_keys[witness]);
            throw std::runtime_error(msg.str());
        }
        mg.transitions.push_back(std::move(tr));
    }

    int witness = -1;
    if (!affine_fit(points, activity, mg.normalizer, &witness))
        throw std::runtime_error(
            "derive_marginal_generator: total activity is not affine in the counts; witness "
            "state " +
            hex_key(state_keys[witness]));
    return mg;
}

CountDistribution marginal_propagate(const MarginalGenerator& mg, const CountVector& c0,
                                     int n) {
    if (n < 0) throw std::invalid_argument("marginal_propagate: negative step count");
    CountDistribution mass = {{c0, Rat(1)}};
    for (int step = 0; step < n; ++step) {
        CountDistribution next;
        for (const auto& [c, p] : mass) {
            Rat z = mg.normalizer.eval(c);
            if (z == 0) {
                next[c] += p;
                continue;
            }
            Rat used = 0;
            for (const auto& tr : mg.transitions) {
                Rat w = tr.weight.eval(c);
                if (w < 0) {
                    std::ostringstream msg;
                    msg << "marginal_propagate: negative weight on counts (";
                    for (std::size_t i = 0; i < c.size(); ++i) msg << (i ? "," : "") << c[i];
                    msg << ")";
                    throw std::runtime_error(msg.str());
                }
                if (w == 0) continue;
                CountVector cy(c.size());
                for (std::size_t i = 0; i < c.size(); ++i) cy[i] = c[i] + tr.delta[i];
                next[cy] += p * w / z;
                used += w;
            }
            if (used != z)
                throw std::runtime_error(
                    "marginal_propagate: weights do not sum to the normalizer on a reached "
                    "count vector");
        }
        mass = std::move(next);
    }
    return mass;
}

CountDistribution project_counts(const CountDistribution& dist, const std::vector<int>& keep) {
    CountDistribution out;
    for (const auto& [c, p] : dist) {
        CountVector nc(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) {
            int k = keep[i];
            if (k < 0 || static_cast<std::size_t>(k) >= c.size())
                throw std::invalid_argument("project_counts: coordinate out of range");
            nc[i] = c[k];
        }
        out[nc] += p;
    }
    return out;
}

void export_distribution(const CountDistribution& dist, const std::vector<std::string>& names,
                         const std::string& format, std::ostream& os) {
    if (format == "csv") {
        for (const auto& name : names) os << name << ',';
        os << "probability\n";
        for (const auto& [c, p] : dist) {
            for (long v : c) os << v << ',';
            os << fifteen_digits(p) << '\n';
        }
        return;
    }
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [c, p] : dist) {
            nlohmann::json row;
            nlohmann::json cj = nlohmann::json::object();
            for (std::size_t i = 0; i < c.size(); ++i) {
                std::string name = i < names.size() ? names[i] : "obs" + std::to_string(i);
                cj[name] = c[i];
            }
            row["counts"] = std::move(cj);
            row["probability"] = rat_to_string(p);
            arr.push_back(std::move(row));
        }
        os << arr.dump(2) << '\n';
        return;
    }
    throw std::invalid_argument("export_distribution: unknown format '" + format + "'");
}

}  // namespace rasm
