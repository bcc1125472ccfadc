#include "trustnet/classify.hpp"

#include "trustnet/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace trustnet {

namespace {

// Value of a voter with its own articles of `publisher` removed.
std::optional<double> value_without(const VoterProfile& voter, Index publisher, const Corpus& corpus,
                                    const PublisherTrust& trust)
{
    std::vector<Index> kept;
    for (Index a : voter.articles)
        if (corpus.article_publisher[a] != publisher)
            kept.push_back(a);
    return mean_trust(kept, corpus, trust);
}

} // namespace

std::vector<PublisherScore> publisher_scores(std::span<const VoterProfile> voters, const Corpus& corpus,
                                             const PublisherTrust& trust, const ScoreOptions& options)
{
    std::vector<double> sum(corpus.n_publishers(), 0.0);
    std::vector<std::size_t> count(corpus.n_publishers(), 0);
    for (const VoterProfile& v : voters) {
        if (!v.value)
            continue;
        for (Index p : corpus.user_publishers(v.user)) {
            double value = *v.value;
            if (options.exclude_self_votes) {
                const auto own = value_without(v, p, corpus, trust);
                if (!own)
                    continue;
                value = *own;
            }
            sum[p] += value;
            ++count[p];
        }
    }
    std::vector<PublisherScore> out;
    for (Index p = 0; p < corpus.n_publishers(); ++p) {
        if (count[p] == 0)
            continue;
        out.push_back({p, corpus.publishers[p], sum[p] / static_cast<double>(count[p]), count[p], trust.label(p)});
    }
    return out;
}

double CoverageReport::percent(TrustLabel level) const noexcept
{
    const auto l = static_cast<std::size_t>(level);
    return universe[l] == 0 ? 0.0 : 100.0 * static_cast<double>(covered[l]) / static_cast<double>(universe[l]);
}

CoverageReport coverage(std::span<const Index> voters, const Corpus& corpus, const PublisherTrust& trust)
{
    CoverageReport report;
    for (Index p = 0; p < corpus.n_publishers(); ++p)
        ++report.universe[static_cast<std::size_t>(trust.label(p))];
    std::vector<char> seen(corpus.n_publishers(), 0);
    for (Index u : voters)
        for (Index a : corpus.user_articles.at(u))
            seen[corpus.article_publisher[a]] = 1;
    for (Index p = 0; p < corpus.n_publishers(); ++p)
        if (seen[p])
            ++report.covered[static_cast<std::size_t>(trust.label(p))];
    return report;
}

namespace {

__extension__ typedef __int128 Wide;

TrustLabel majority(std::size_t t, std::size_t n)
{
    return t > n ? TrustLabel::trustworthy : TrustLabel::untrustworthy;
}

} // namespace

Stump fit_stump(std::span<const Sample> samples)
{
    std::vector<Sample> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(), [](const Sample& l, const Sample& r) { return l.score < r.score; });
    std::size_t total_t = 0, total_n = 0;
    for (const Sample& s : sorted) {
        if (s.label == TrustLabel::trustworthy)
            ++total_t;
        else if (s.label == TrustLabel::untrustworthy)
            ++total_n;
        else
            throw Error("fit_stump: unclassified sample");
    }
    if (total_t == 0 || total_n == 0)
        throw Error("fit_stump: both classes are required");

    // Minimising weighted Gini is maximising sum_s (t_s^2 + n_s^2) / size_s.
    // Candidates compare as fractions num / den with exact integer arithmetic.
    Stump best{sorted.front().score, majority(total_t, total_n), majority(total_t, total_n)};
    Wide best_num = 0, best_den = 1;
    bool found = false;
    std::size_t lt = 0, ln = 0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        (sorted[i].label == TrustLabel::trustworthy ? lt : ln) += 1;
        if (sorted[i].score == sorted[i + 1].score)
            continue;
        const std::size_t rt = total_t - lt, rn = total_n - ln;
        const Wide left = static_cast<Wide>(lt + ln), right = static_cast<Wide>(rt + rn);
        const Wide num = (static_cast<Wide>(lt) * lt + static_cast<Wide>(ln) * ln) * right +
                         (static_cast<Wide>(rt) * rt + static_cast<Wide>(rn) * rn) * left;
        const Wide den = left * right;
        if (!found || num * best_den > best_num * den) {
            found = true;
            best_num = num;
            best_den = den;
            best.threshold = sorted[i].score + (sorted[i + 1].score - sorted[i].score) / 2.0;
            best.below = majority(lt, ln);
            best.above = majority(rt, rn);
        }
    }
    return best;
}

void Confusion::add(TrustLabel truth, TrustLabel predicted)
{
    if (truth == TrustLabel::trustworthy)
        ++(predicted == TrustLabel::trustworthy ? tp : fn);
    else
        ++(predicted == TrustLabel::untrustworthy ? tn : fp);
}

double Confusion::balanced_accuracy() const noexcept
{
    const double tpr = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double tnr = tn + fp == 0 ? 0.0 : static_cast<double>(tn) / static_cast<double>(tn + fp);
    return (tpr + tnr) / 2.0;
}

Confusion evaluate(const Stump& stump, std::span<const Sample> samples)
{
    Confusion c;
    for (const Sample& s : samples)
        c.add(s.label, stump.predict(s.score));
    return c;
}

CvReport stratified_cv(std::span<const Sample> samples, std::size_t folds, std::uint64_t seed)
{
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].label == TrustLabel::trustworthy)
            pos.push_back(i);
        else if (samples[i].label == TrustLabel::untrustworthy)
            neg.push_back(i);
        else
            throw Error("stratified_cv: unclassified sample");
    }
    const std::size_t minority = std::min(pos.size(), neg.size());
    if (minority < 2)
        throw Error("stratified_cv: each class needs at least 2 samples");
    if (folds < 2)
        throw Error("stratified_cv: at least 2 folds are required");
    folds = std::min(folds, minority);

    Rng rng(seed);
    std::vector<std::size_t> fold_of(samples.size());
    for (auto* cls : {&pos, &neg}) {
        rng.shuffle(std::span<std::size_t>(*cls));
        for (std::size_t k = 0; k < cls->size(); ++k)
            fold_of[(*cls)[k]] = k % folds;
    }

    CvReport report;
    report.folds = folds;
    report.seed = seed;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<Sample> train, test;
        for (std::size_t i = 0; i < samples.size(); ++i)
            (fold_of[i] == f ? test : train).push_back(samples[i]);
        const Confusion c = evaluate(fit_stump(train), test);
        report.confusion.push_back(c);
        report.fold_accuracy.push_back(c.balanced_accuracy());
    }
    const double n = static_cast<double>(folds);
    report.mean = std::accumulate(report.fold_accuracy.begin(), report.fold_accuracy.end(), 0.0) / n;
    double var = 0.0;
    for (double a : report.fold_accuracy)
        var += (a - report.mean) * (a - report.mean);
    report.stddev = std::sqrt(var / n);
    return report;
}

std::vector<Sample> labeled_samples(std::span<const PublisherScore> scores)
{
    std::vector<Sample> out;
    for (const auto& s : scores)
        if (s.kb_label != TrustLabel::unclassified)
            out.push_back({s.score, s.kb_label});
    return out;
}

std::vector<WorthyEntry> worthy_list(std::span<const PublisherScore> scores, const Stump& stump)
{
    std::vector<WorthyEntry> out;
    for (const auto& s : scores)
        if (s.kb_label == TrustLabel::unclassified)
            out.push_back({s.publisher, s.domain, s.score, s.n_voters, stump.predict(s.score)});
    std::sort(out.begin(), out.end(), [](const WorthyEntry& l, const WorthyEntry& r) {
        if (l.n_voters != r.n_voters)
            return l.n_voters > r.n_voters;
        return std::tie(l.score, l.domain) < std::tie(r.score, r.domain);
    });
    return out;
}

} // namespace trustnet
