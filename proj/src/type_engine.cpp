#include "lomodal/type_engine.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <unordered_map>

namespace lomodal {

struct TypeEngine::Impl {
    std::map<std::tuple<int, int, std::vector<std::pair<Ref, Ref>>>, Ref> intern_map;
    std::unordered_map<std::uint64_t, Ref> term_memo;    // (term, rank)
    std::unordered_map<std::uint64_t, Ref> compose_memo; // (a, b)
    std::unordered_map<std::uint64_t, Ref> project_memo; // a
    std::unordered_map<std::uint64_t, Ref> omega_memo;   // a
    std::unordered_map<std::uint64_t, Ref> omega_star_memo;
    std::unordered_map<std::uint64_t, Ref> eta_memo;
    std::map<int, int> chain_stab;
    std::mutex mtx;
};

TypeEngine::TypeEngine(int count_cap) : cap_(count_cap), impl_(new Impl) {}

TypeEngine::~TypeEngine() { delete impl_; }

int TypeEngine::cap_size(long long sz) const {
    if (cap_ == 0) return kBigSize; // no size tracking: single rank-0 value
    if (sz == kInfinite || sz >= cap_) return kBigSize;
    return static_cast<int>(sz);
}

int TypeEngine::add_sizes(int a, int b) const {
    if (cap_ == 0 || a == kBigSize || b == kBigSize) return kBigSize;
    long long s = static_cast<long long>(a) + b;
    return s >= cap_ ? kBigSize : static_cast<int>(s);
}

TypeEngine::Ref TypeEngine::intern(int rank, int size, std::vector<std::pair<Ref, Ref>> splits) {
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
    auto key = std::make_tuple(rank, size, splits);
    std::lock_guard<std::mutex> lock(impl_->mtx);
    auto it = impl_->intern_map.find(key);
    if (it != impl_->intern_map.end()) return it->second;
    Ref id = static_cast<Ref>(nodes_.size());
    nodes_.push_back(Node{rank, size, std::move(splits)});
    impl_->intern_map.emplace(std::move(key), id);
    return id;
}

bool TypeEngine::empty_type(Ref r) const {
    const Node& n = nodes_[r];
    if (n.rank >= 1) return n.splits.empty();
    if (cap_ >= 1) return n.size == 0;
    throw DomainError("emptiness not readable from a rank-0 type with no size cap");
}

TypeEngine::Ref TypeEngine::type_of(TermId t, int rank) {
    std::uint64_t key = (static_cast<std::uint64_t>(t) << 8) | static_cast<std::uint64_t>(rank);
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        auto it = impl_->term_memo.find(key);
        if (it != impl_->term_memo.end()) return it->second;
    }
    Ref result;
    const OrderTermNode& n = term_node(t);
    if (rank == 0) {
        result = intern(0, cap_size(term_size(t)), {});
    } else {
        switch (n.tag) {
            case OTag::Fin: {
                std::vector<std::pair<Ref, Ref>> splits;
                for (int i = 0; i < n.fin_n; ++i)
                    splits.emplace_back(type_of(t_fin(i), rank - 1), type_of(t_fin(n.fin_n - 1 - i), rank - 1));
                result = intern(rank, cap_size(n.fin_n), std::move(splits));
                break;
            }
            case OTag::Sum: {
                Ref acc = type_of(n.kids[0], rank);
                for (std::size_t i = 1; i < n.kids.size(); ++i)
                    acc = compose_sum(acc, type_of(n.kids[i], rank));
                result = acc;
                break;
            }
            case OTag::Omega: result = omega_sum_of(type_of(t_fin(1), rank)); break;
            case OTag::OmegaStar: result = omega_star_sum_of(type_of(t_fin(1), rank)); break;
            case OTag::Zeta:
                result = compose_sum(omega_star_sum_of(type_of(t_fin(1), rank)),
                                     omega_sum_of(type_of(t_fin(1), rank)));
                break;
            case OTag::Eta: result = eta_sum_of(type_of(t_fin(1), rank)); break;
            case OTag::OmegaSum: result = omega_sum_of(type_of(n.kids[0], rank)); break;
            case OTag::OmegaStarSum: result = omega_star_sum_of(type_of(n.kids[0], rank)); break;
            case OTag::EtaSum: result = eta_sum_of(type_of(n.kids[0], rank)); break;
            default: throw DomainError("type_of: bad term");
        }
    }
    std::lock_guard<std::mutex> lock(impl_->mtx);
    impl_->term_memo.emplace(key, result);
    return result;
}

TypeEngine::Ref TypeEngine::compose_sum(Ref a, Ref b) {
    const int rank = nodes_[a].rank;
    if (nodes_[b].rank != rank) throw DomainError("compose_sum: rank mismatch");
    std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        auto it = impl_->compose_memo.find(key);
        if (it != impl_->compose_memo.end()) return it->second;
    }
    Ref result;
    int size = add_sizes(nodes_[a].size, nodes_[b].size);
    if (rank == 0) {
        result = intern(0, size, {});
    } else {
        Ref a_low = project(a);
        Ref b_low = project(b);
        // copy the split lists: interning below may reallocate nodes_
        auto a_splits = nodes_[a].splits;
        auto b_splits = nodes_[b].splits;
        std::vector<std::pair<Ref, Ref>> splits;
        for (const auto& [pre, suf] : a_splits)
            splits.emplace_back(pre, compose_sum(suf, b_low));
        for (const auto& [pre, suf] : b_splits)
            splits.emplace_back(compose_sum(a_low, pre), suf);
        result = intern(rank, size, std::move(splits));
    }
    std::lock_guard<std::mutex> lock(impl_->mtx);
    impl_->compose_memo.emplace(key, result);
    return result;
}

TypeEngine::Ref TypeEngine::project(Ref t) {
    const int rank = nodes_[t].rank;
    const int size = nodes_[t].size;
    if (rank == 0) throw DomainError("cannot project a rank-0 type");
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        auto it = impl_->project_memo.find(t);
        if (it != impl_->project_memo.end()) return it->second;
    }
    Ref result;
    if (rank == 1) {
        result = intern(0, size, {});
    } else {
        auto t_splits = nodes_[t].splits; // interning may reallocate nodes_
        std::vector<std::pair<Ref, Ref>> splits;
        for (const auto& [pre, suf] : t_splits) splits.emplace_back(project(pre), project(suf));
        result = intern(rank - 1, size, std::move(splits));
    }
    std::lock_guard<std::mutex> lock(impl_->mtx);
    impl_->project_memo.emplace(t, result);
    return result;
}

namespace {

// distinct values of the finite powers p_0 = empty, p_{n+1} = p_n + t;
// deterministic because the sequence is an iterated function
template <typename Compose>
std::vector<TypeEngine::Ref> power_values(TypeEngine::Ref unit_empty, TypeEngine::Ref t, Compose comp) {
    std::vector<TypeEngine::Ref> values;
    TypeEngine::Ref cur = unit_empty;
    for (int guard = 0; guard < 4096; ++guard) {
        if (std::find(values.begin(), values.end(), cur) != values.end()) return values;
        values.push_back(cur);
        cur = comp(cur, t);
    }
    throw DomainError("power iteration failed to stabilize");
}

} // namespace

TypeEngine::Ref TypeEngine::omega_sum_of(Ref t) {
    const int rank = nodes_[t].rank;
    const bool no_splits = nodes_[t].splits.empty();
    const int size0 = nodes_[t].size;
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        auto it = impl_->omega_memo.find(t);
        if (it != impl_->omega_memo.end()) return it->second;
    }
    Ref result;
    if (rank == 0) {
        result = intern(0, cap_ >= 1 && size0 == 0 ? cap_size(0) : cap_size(kInfinite), {});
    } else if (no_splits) {
        result = intern(rank, cap_size(0), {}); // empty inner term: empty sum
    } else {
        Ref t_low = project(t);
        Ref s_low = omega_sum_of(t_low); // type of T*omega one rank down
        Ref empty_low = type_of(t_fin(0), rank - 1);
        auto powers = power_values(empty_low, t_low,
                                   [this](Ref a, Ref b) { return compose_sum(a, b); });
        auto t_splits = nodes_[t].splits;
        std::vector<std::pair<Ref, Ref>> splits;
        for (Ref p : powers)
            for (const auto& [pre, suf] : t_splits)
                splits.emplace_back(compose_sum(p, pre), compose_sum(suf, s_low));
        result = intern(rank, kBigSize, std::move(splits));
    }
    std::lock_guard<std::mutex> lock(impl_->mtx);
    impl_->omega_memo.emplace(t, result);
    return result;
}

TypeEngine::Ref TypeEngine::omega_star_sum_of(Ref t) {
    const int rank = nodes_[t].rank;
    const bool no_splits = nodes_[t].splits.empty();
    const int size0 = nodes_[t].size;
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        auto it = impl_->omega_star_memo.find(t);
        if (it != impl_->omega_star_memo.end()) return it->second;
    }
    Ref result;
    if (rank == 0) {
        result = intern(0, cap_ >= 1 && size0 == 0 ? cap_size(0) : cap_size(kInfinite), {});
    } else if (no_splits) {
        result = intern(rank, cap_size(0), {});
    } else {
        Ref t_low = project(t);
        Ref s_low = omega_star_sum_of(t_low);
        Ref empty_low = type_of(t_fin(0), rank - 1);
        auto powers = power_values(empty_low, t_low,
                                   [this](Ref a, Ref b) { return compose_sum(a, b); });
        auto t_splits = nodes_[t].splits;
        std::vector<std::pair<Ref, Ref>> splits;
        for (Ref p : powers)
            for (const auto& [pre, suf] : t_splits)
                splits.emplace_back(compose_sum(s_low, pre), compose_sum(suf, p));
        result = intern(rank, kBigSize, std::move(splits));
    }
    std::lock_guard<std::mutex> lock(impl_->mtx);
    impl_->omega_star_memo.emplace(t, result);
    return result;
}

TypeEngine::Ref TypeEngine::eta_sum_of(Ref t) {
    const int rank = nodes_[t].rank;
    const bool no_splits = nodes_[t].splits.empty();
    const int size0 = nodes_[t].size;
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        auto it = impl_->eta_memo.find(t);
        if (it != impl_->eta_memo.end()) return it->second;
    }
    Ref result;
    if (rank == 0) {
        result = intern(0, cap_ >= 1 && size0 == 0 ? cap_size(0) : cap_size(kInfinite), {});
    } else if (no_splits) {
        result = intern(rank, cap_size(0), {});
    } else {
        Ref e_low = eta_sum_of(project(t)); // both sides of any split are eta-sums again
        auto t_splits = nodes_[t].splits;
        std::vector<std::pair<Ref, Ref>> splits;
        for (const auto& [pre, suf] : t_splits)
            splits.emplace_back(compose_sum(e_low, pre), compose_sum(suf, e_low));
        result = intern(rank, kBigSize, std::move(splits));
    }
    std::lock_guard<std::mutex> lock(impl_->mtx);
    impl_->eta_memo.emplace(t, result);
    return result;
}

int TypeEngine::chain_stabilization(int rank) {
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        auto it = impl_->chain_stab.find(rank);
        if (it != impl_->chain_stab.end()) return it->second;
    }
    int s = 0;
    for (; s < 4096; ++s) {
        if (type_of(t_fin(s), rank) == type_of(t_fin(s + 1), rank)) break;
    }
    if (s == 4096) throw DomainError("chain types failed to stabilize");
    std::lock_guard<std::mutex> lock(impl_->mtx);
    impl_->chain_stab.emplace(rank, s);
    return s;
}

TypeEngine& TypeEngine::shared(int count_cap) {
    static std::mutex m;
    static std::map<int, std::unique_ptr<TypeEngine>> engines;
    std::lock_guard<std::mutex> lock(m);
    auto it = engines.find(count_cap);
    if (it == engines.end())
        it = engines.emplace(count_cap, std::make_unique<TypeEngine>(count_cap)).first;
    return *it->second;
}

} // namespace lomodal
