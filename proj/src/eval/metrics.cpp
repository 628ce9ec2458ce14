#include "hetsep/eval/metrics.hpp"

#include "hetsep/graph/io.hpp"
#include "hetsep/graph/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hetsep::eval {

Splits make_splits(const std::vector<int>& labels, int num_classes, const SplitSpec& spec) {
    if (spec.train_per_class < 1) throw std::invalid_argument("train_per_class must be >= 1");
    std::mt19937_64 rng(spec.seed);
    std::vector<std::vector<Index>> by_class(static_cast<size_t>(num_classes));
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) throw std::invalid_argument("label out of range");
        by_class[static_cast<size_t>(labels[i])].push_back(static_cast<Index>(i));
    }
    Splits s;
    std::vector<Index> rest;
    for (int c = 0; c < num_classes; ++c) {
        auto& nodes = by_class[static_cast<size_t>(c)];
        if (static_cast<int>(nodes.size()) < spec.train_per_class) {
            throw std::invalid_argument("class " + std::to_string(c) + " has " + std::to_string(nodes.size()) +
                                        " nodes, fewer than the " + std::to_string(spec.train_per_class) +
                                        " requested for training");
        }
        std::shuffle(nodes.begin(), nodes.end(), rng);
        s.train.insert(s.train.end(), nodes.begin(), nodes.begin() + spec.train_per_class);
        rest.insert(rest.end(), nodes.begin() + spec.train_per_class, nodes.end());
    }
    std::sort(rest.begin(), rest.end());
    std::shuffle(rest.begin(), rest.end(), rng);
    const auto remainder = static_cast<Index>(rest.size());
    Index nv = spec.val_size, nt = spec.test_size;
    if (remainder < nv + nt) nv = nt = remainder / 2;
    if (nt < 1) throw std::invalid_argument("not enough nodes left for a test split");
    s.val.assign(rest.begin(), rest.begin() + nv);
    s.test.assign(rest.begin() + nv, rest.begin() + nv + nt);
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred) {
    if (truth.size() != pred.size() || truth.empty()) throw std::invalid_argument("micro_f1: size mismatch");
    size_t hit = 0;
    for (size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i];
    return 100.0 * static_cast<double>(hit) / static_cast<double>(truth.size());
}

double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int num_classes) {
    if (truth.size() != pred.size() || truth.empty()) throw std::invalid_argument("macro_f1: size mismatch");
    std::vector<double> tp(static_cast<size_t>(num_classes)), fp(tp), fn(tp);
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == pred[i]) {
            tp[static_cast<size_t>(truth[i])] += 1;
        } else {
            fp[static_cast<size_t>(pred[i])] += 1;
            fn[static_cast<size_t>(truth[i])] += 1;
        }
    }
    double sum = 0;
    int counted = 0;
    for (size_t c = 0; c < tp.size(); ++c) {
        const double denom = 2 * tp[c] + fp[c] + fn[c];
        if (denom == 0) continue;  // class absent from both truth and prediction
        sum += 2 * tp[c] / denom;
        ++counted;
    }
    return 100.0 * sum / counted;
}

double roc_auc(const std::vector<double>& score, const std::vector<char>& positive) {
    const auto n = static_cast<Index>(score.size());
    double pos = 0;
    for (char p : positive) pos += p;
    const double neg = static_cast<double>(n) - pos;
    if (pos == 0 || neg == 0) return std::numeric_limits<double>::quiet_NaN();
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return score[static_cast<size_t>(a)] < score[static_cast<size_t>(b)]; });
    double rank_sum = 0;
    for (Index i = 0; i < n;) {
        Index j = i;
        while (j < n && score[static_cast<size_t>(order[static_cast<size_t>(j)])] ==
                            score[static_cast<size_t>(order[static_cast<size_t>(i)])]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (Index k = i; k < j; ++k) rank_sum += positive[static_cast<size_t>(order[static_cast<size_t>(k)])] * avg;
        i = j;
    }
    return (rank_sum - pos * (pos + 1) / 2) / (pos * neg);
}

double macro_auc(const std::vector<int>& truth, const Matrix<double>& prob) {
    const auto n = static_cast<Index>(truth.size());
    if (prob.rows() != n) throw std::invalid_argument("macro_auc: size mismatch");
    double sum = 0;
    int counted = 0;
    std::vector<double> score(static_cast<size_t>(n));
    std::vector<char> positive(static_cast<size_t>(n));
    for (Index c = 0; c < prob.cols(); ++c) {
        for (Index i = 0; i < n; ++i) {
            score[static_cast<size_t>(i)] = prob(i, c);
            positive[static_cast<size_t>(i)] = truth[static_cast<size_t>(i)] == c;
        }
        const double a = roc_auc(score, positive);
        if (std::isnan(a)) continue;
        sum += a;
        ++counted;
    }
    if (counted == 0) throw std::invalid_argument("AUC undefined: the test set holds a single class");
    return sum / counted;
}

double micro_auc(const std::vector<int>& truth, const Matrix<double>& prob) {
    const auto n = static_cast<Index>(truth.size());
    if (prob.rows() != n) throw std::invalid_argument("micro_auc: size mismatch");
    std::vector<double> score;
    std::vector<char> positive;
    score.reserve(static_cast<size_t>(prob.size()));
    positive.reserve(static_cast<size_t>(prob.size()));
    for (Index i = 0; i < n; ++i) {
        for (Index c = 0; c < prob.cols(); ++c) {
            score.push_back(prob(i, c));
            positive.push_back(truth[static_cast<size_t>(i)] == c);
        }
    }
    const double a = roc_auc(score, positive);
    if (std::isnan(a)) throw std::invalid_argument("AUC undefined: the test set holds a single class");
    return a;
}

namespace {

Matrix<double> rows_of(const Matrix<double>& x, const std::vector<Index>& idx) {
    Matrix<double> out(static_cast<Index>(idx.size()), x.cols());
    for (size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Index>(k)) = x.row(idx[k]);
    return out;
}

std::vector<int> labels_of(const std::vector<int>& labels, const std::vector<Index>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (Index i : idx) out.push_back(labels[static_cast<size_t>(i)]);
    return out;
}

Matrix<double> softmax_rows(const Matrix<double>& logits) {
    Matrix<double> p = logits;
    for (Index i = 0; i < p.rows(); ++i) {
        const double m = p.row(i).maxCoeff();
        p.row(i) = (p.row(i).array() - m).exp().matrix();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

std::vector<int> argmax_rows(const Matrix<double>& p) {
    std::vector<int> out(static_cast<size_t>(p.rows()));
    for (Index i = 0; i < p.rows(); ++i) {
        Index best = 0;
        p.row(i).maxCoeff(&best);
        out[static_cast<size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

struct Softmax {
    Matrix<double> w;
    Vector<double> b;

    Matrix<double> prob(const Matrix<double>& x) const {
        Matrix<double> logits = x * w;
        logits.rowwise() += b.transpose();
        return softmax_rows(logits);
    }
};

Softmax fit_softmax(const Matrix<double>& x, const std::vector<int>& y, int num_classes, double l2,
                    const LogisticOptions& o) {
    const Index n = x.rows(), d = x.cols();
    Softmax m{Matrix<double>::Zero(d, num_classes), Vector<double>::Zero(num_classes)};
    Matrix<double> onehot = Matrix<double>::Zero(n, num_classes);
    for (Index i = 0; i < n; ++i) onehot(i, y[static_cast<size_t>(i)]) = 1;
    Matrix<double> mw = Matrix<double>::Zero(d, num_classes), vw = mw;
    Vector<double> mb = Vector<double>::Zero(num_classes), vb = mb;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int t = 1; t <= o.steps; ++t) {
        const Matrix<double> err = (m.prob(x) - onehot) / static_cast<double>(n);
        const Matrix<double> gw = x.transpose() * err + l2 * m.w;
        const Vector<double> gb = err.colwise().sum().transpose();
        const double c1 = 1 - std::pow(b1, t), c2 = 1 - std::pow(b2, t);
        mw = b1 * mw + (1 - b1) * gw;
        vw = b2 * vw + (1 - b2) * gw.cwiseProduct(gw);
        mb = b1 * mb + (1 - b1) * gb;
        vb = b2 * vb + (1 - b2) * gb.cwiseProduct(gb);
        m.w.array() -= o.lr * (mw.array() / c1) / ((vw.array() / c2).sqrt() + eps);
        m.b.array() -= o.lr * (mb.array() / c1) / ((vb.array() / c2).sqrt() + eps);
    }
    return m;
}

}  // namespace

ClassificationResult logistic_eval(const Matrix<double>& emb, const std::vector<int>& labels, int num_classes,
                                   const Splits& splits, const LogisticOptions& options) {
    if (static_cast<Index>(labels.size()) != emb.rows()) throw std::invalid_argument("logistic_eval: label count mismatch");
    if (options.l2_grid.empty()) throw std::invalid_argument("logistic_eval: empty regularisation grid");
    Matrix<double> xtr = rows_of(emb, splits.train);
    const Vector<double> mean = xtr.colwise().mean().transpose();
    Vector<double> sd = ((xtr.rowwise() - mean.transpose()).array().square().colwise().mean()).sqrt().transpose();
    for (Index c = 0; c < sd.size(); ++c) {
        if (!(sd(c) > 1e-12)) sd(c) = 1.0;
    }
    auto standardize = [&](Matrix<double> x) {
        x.rowwise() -= mean.transpose();
        x.array().rowwise() /= sd.transpose().array();
        return x;
    };
    xtr = standardize(xtr);
    const Matrix<double> xva = standardize(rows_of(emb, splits.val));
    const Matrix<double> xte = standardize(rows_of(emb, splits.test));
    const auto ytr = labels_of(labels, splits.train);
    const auto yva = labels_of(labels, splits.val);
    const auto yte = labels_of(labels, splits.test);

    double best_val = -1;
    Softmax best;
    double best_l2 = options.l2_grid.front();
    for (double l2 : options.l2_grid) {
        Softmax m = fit_softmax(xtr, ytr, num_classes, l2, options);
        const double v = yva.empty() ? 0.0 : micro_f1(yva, argmax_rows(m.prob(xva)));
        if (v > best_val) {
            best_val = v;
            best = std::move(m);
            best_l2 = l2;
        }
    }
    const Matrix<double> p = best.prob(xte);
    const auto pred = argmax_rows(p);
    return {micro_f1(yte, pred), macro_f1(yte, pred, num_classes), options.auc == AucAverage::micro ? micro_auc(yte, p) : macro_auc(yte, p),
            best_l2};
}

std::vector<int> kmeans(const Matrix<double>& x, int k, std::uint64_t seed, int max_iter, double tol) {
    const Index n = x.rows();
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    {
        std::vector<Index> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), Index{0});
        auto less = [&](Index a, Index b) {
            for (Index c = 0; c < x.cols(); ++c) {
                if (x(a, c) != x(b, c)) return x(a, c) < x(b, c);
            }
            return false;
        };
        std::sort(order.begin(), order.end(), less);
        Index distinct = n > 0 ? 1 : 0;
        for (Index i = 1; i < n; ++i) distinct += less(order[static_cast<size_t>(i - 1)], order[static_cast<size_t>(i)]);
        if (k > distinct) throw std::invalid_argument("kmeans: k exceeds the number of distinct points");
    }
    std::mt19937_64 rng(seed);
    Matrix<double> centers(k, x.cols());
    std::uniform_int_distribution<Index> pick(0, n - 1);
    centers.row(0) = x.row(pick(rng));
    Vector<double> d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        std::discrete_distribution<Index> dist(d2.data(), d2.data() + n);
        centers.row(c) = x.row(dist(rng));
        d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    std::vector<int> assign(static_cast<size_t>(n), 0);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        double inertia = 0;
        for (Index i = 0; i < n; ++i) {
            Index best = 0;
            const double dist = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
            assign[static_cast<size_t>(i)] = static_cast<int>(best);
            inertia += dist;
        }
        Matrix<double> sum = Matrix<double>::Zero(k, x.cols());
        Vector<double> count = Vector<double>::Zero(k);
        for (Index i = 0; i < n; ++i) {
            sum.row(assign[static_cast<size_t>(i)]) += x.row(i);
            count(assign[static_cast<size_t>(i)]) += 1;
        }
        for (int c = 0; c < k; ++c) {
            if (count(c) > 0) centers.row(c) = sum.row(c) / count(c);
        }
        if (inertia == 0 || (std::isfinite(prev) && std::abs(prev - inertia) / prev < tol)) break;
        prev = inertia;
    }
    return assign;
}

namespace {

struct Contingency {
    std::vector<std::vector<double>> table;
    std::vector<double> rows, cols;
    double n = 0;
};

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("partition sizes differ");
    auto relabel = [](const std::vector<int>& v) {
        std::vector<int> keys = v;
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        std::vector<int> out;
        for (int x : v) out.push_back(static_cast<int>(std::lower_bound(keys.begin(), keys.end(), x) - keys.begin()));
        return std::make_pair(out, keys.size());
    };
    const auto [ra, ka] = relabel(a);
    const auto [rb, kb] = relabel(b);
    Contingency c;
    c.table.assign(ka, std::vector<double>(kb, 0.0));
    c.rows.assign(ka, 0.0);
    c.cols.assign(kb, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        c.table[static_cast<size_t>(ra[i])][static_cast<size_t>(rb[i])] += 1;
        c.rows[static_cast<size_t>(ra[i])] += 1;
        c.cols[static_cast<size_t>(rb[i])] += 1;
    }
    c.n = static_cast<double>(a.size());
    return c;
}

double entropy(const std::vector<double>& counts, double n) {
    double h = 0;
    for (double c : counts) {
        if (c > 0) h -= (c / n) * std::log(c / n);
    }
    return h;
}

}  // namespace

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    const auto c = contingency(a, b);
    const double ha = entropy(c.rows, c.n), hb = entropy(c.cols, c.n);
    if (ha == 0 && hb == 0) return 1.0;
    double mi = 0;
    for (size_t i = 0; i < c.rows.size(); ++i) {
        for (size_t j = 0; j < c.cols.size(); ++j) {
            const double nij = c.table[i][j];
            if (nij > 0) mi += (nij / c.n) * std::log(c.n * nij / (c.rows[i] * c.cols[j]));
        }
    }
    return std::max(0.0, mi / (0.5 * (ha + hb)));
}

double ari(const std::vector<int>& a, const std::vector<int>& b) {
    const auto c = contingency(a, b);
    auto pairs = [](double x) { return x * (x - 1) / 2; };
    double index = 0, sa = 0, sb = 0;
    for (const auto& row : c.table) {
        for (double nij : row) index += pairs(nij);
    }
    for (double x : c.rows) sa += pairs(x);
    for (double x : c.cols) sb += pairs(x);
    const double expected = sa * sb / pairs(c.n);
    const double max_index = 0.5 * (sa + sb);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

ClusteringResult kmeans_eval(const Matrix<double>& emb, const std::vector<int>& labels, int k, int trials,
                             std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("kmeans_eval: trials must be >= 1");
    ClusteringResult r;
    for (int t = 0; t < trials; ++t) {
        const auto assign = kmeans(emb, k, graph::mix_seed(seed, static_cast<std::uint64_t>(t), 0x6b6dULL));
        r.nmi += nmi(labels, assign);
        r.ari += ari(labels, assign);
    }
    r.nmi /= trials;
    r.ari /= trials;
    return r;
}

double sim_at_k(const Matrix<double>& emb, const std::vector<int>& labels, int k) {
    const Index n = emb.rows();
    if (k < 1 || k >= n) throw std::invalid_argument("sim_at_k: k must lie in [1, node count)");
    Matrix<double> unit = emb;
    for (Index i = 0; i < n; ++i) {
        const double norm = unit.row(i).norm();
        if (norm > 0) unit.row(i) /= norm;
    }
    const Matrix<double> sim = unit * unit.transpose();
    std::vector<Index> order(static_cast<size_t>(n - 1));
    double total = 0;
    for (Index i = 0; i < n; ++i) {
        size_t q = 0;
        for (Index j = 0; j < n; ++j) {
            if (j != i) order[q++] = j;
        }
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
            return sim(i, a) != sim(i, b) ? sim(i, a) > sim(i, b) : a < b;
        });
        int same = 0;
        for (int q2 = 0; q2 < k; ++q2) same += labels[static_cast<size_t>(order[static_cast<size_t>(q2)])] == labels[static_cast<size_t>(i)];
        total += static_cast<double>(same) / k;
    }
    return 100.0 * total / static_cast<double>(n);
}

MetricStat summarize(const std::vector<double>& values) {
    MetricStat s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(var / static_cast<double>(values.size()));
    return s;
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [name, st] : metrics) m[name] = {{"mean", st.mean}, {"std", st.std}};
    return {{"metrics", m}, {"trials", trials}, {"metadata", metadata}};
}

std::string MetricsReport::to_tsv() const {
    std::string out = "metric\tmean\tstd\ttrials\n";
    for (const auto& [name, st] : metrics) {
        out += name + '\t' + graph::format_number(st.mean) + '\t' + graph::format_number(st.std) + '\t' +
               std::to_string(trials) + '\n';
    }
    return out;
}

MetricsReport evaluate(const Matrix<double>& emb, const std::vector<int>& labels, int num_classes,
                       const EvalOptions& options, const Splits* preset) {
    if (options.trials < 1) throw std::invalid_argument("evaluate: trials must be >= 1");
    std::vector<double> mi, ma, auc;
    for (int t = 0; t < options.trials; ++t) {
        Splits s;
        if (preset != nullptr) {
            s = *preset;
        } else {
            SplitSpec spec;
            spec.train_per_class = options.train_per_class;
            spec.seed = graph::mix_seed(options.seed, static_cast<std::uint64_t>(t), 0x73706cULL);
            s = make_splits(labels, num_classes, spec);
        }
        const auto r = logistic_eval(emb, labels, num_classes, s, options.logistic);
        mi.push_back(r.micro_f1);
        ma.push_back(r.macro_f1);
        auc.push_back(r.auc);
    }
    MetricsReport rep;
    rep.trials = options.trials;
    rep.metrics["micro_f1"] = summarize(mi);
    rep.metrics["macro_f1"] = summarize(ma);
    rep.metrics["auc"] = summarize(auc);
    if (options.clustering) {
        std::vector<double> nm, ar;
        for (int t = 0; t < options.trials; ++t) {
            const auto c = kmeans_eval(emb, labels, num_classes, 1, graph::mix_seed(options.seed, static_cast<std::uint64_t>(t), 0x6b6dULL));
            nm.push_back(c.nmi);
            ar.push_back(c.ari);
        }
        rep.metrics["nmi"] = summarize(nm);
        rep.metrics["ari"] = summarize(ar);
    }
    if (options.similarity) {
        for (int k : {5, 10}) {
            if (k < emb.rows()) rep.metrics["sim@" + std::to_string(k)] = summarize({sim_at_k(emb, labels, k)});
        }
    }
    rep.metadata["train_per_class"] = options.train_per_class;
    rep.metadata["seed"] = options.seed;
    return rep;
}

}  // namespace hetsep::eval
