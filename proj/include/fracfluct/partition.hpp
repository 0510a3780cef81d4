#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracfluct {

// Set partition of {0, ..., n-1}; block ids are canonical (ordered by least element).
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> block_of) : block_(std::move(block_of)) { canonicalize(); }

    static Partition from_blocks(std::size_t n, const std::vector<std::vector<int>>& blocks) {
        std::vector<int> b(n, -1);
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            if (blocks[k].empty()) throw std::invalid_argument("Partition: empty block");
            for (int i : blocks[k]) {
                if (i < 0 || static_cast<std::size_t>(i) >= n) throw std::invalid_argument("Partition: index out of range");
                if (b[static_cast<std::size_t>(i)] != -1) throw std::invalid_argument("Partition: blocks overlap");
                b[static_cast<std::size_t>(i)] = static_cast<int>(k);
            }
        }
        for (int v : b)
            if (v == -1) throw std::invalid_argument("Partition: blocks do not cover the ground set");
        return Partition(std::move(b));
    }
    static Partition singletons(std::size_t n) {
        std::vector<int> b(n);
        std::iota(b.begin(), b.end(), 0);
        return Partition(std::move(b));
    }
    static Partition one_block(std::size_t n) { return Partition(std::vector<int>(n, 0)); }

    std::size_t size() const noexcept { return block_.size(); }
    int block_of(std::size_t i) const { return block_.at(i); }
    const std::vector<int>& assignment() const noexcept { return block_; }
    std::size_t num_blocks() const noexcept { return nblocks_; }

    std::vector<std::vector<int>> blocks() const {
        std::vector<std::vector<int>> out(nblocks_);
        for (std::size_t i = 0; i < block_.size(); ++i) out[static_cast<std::size_t>(block_[i])].push_back(static_cast<int>(i));
        return out;
    }
    bool is_pairing() const {
        for (const auto& b : blocks())
            if (b.size() != 2) return false;
        return true;
    }
    std::vector<std::vector<int>> singleton_blocks() const {
        std::vector<std::vector<int>> out;
        for (auto& b : blocks())
            if (b.size() == 1) out.push_back(b);
        return out;
    }

    // 1-based text form "1,2;3,4"
    std::string to_string() const {
        std::ostringstream os;
        const auto bs = blocks();
        for (std::size_t k = 0; k < bs.size(); ++k) {
            if (k) os << ';';
            for (std::size_t j = 0; j < bs[k].size(); ++j) os << (j ? "," : "") << bs[k][j] + 1;
        }
        return os.str();
    }
    static Partition parse(std::size_t n, const std::string& text) {
        std::vector<std::vector<int>> blocks;
        std::stringstream ss(text);
        std::string blk;
        while (std::getline(ss, blk, ';')) {
            std::vector<int> b;
            std::stringstream bs(blk);
            std::string item;
            while (std::getline(bs, item, ',')) {
                item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
                if (item.empty()) continue;
                std::size_t used = 0;
                const int v = std::stoi(item, &used);
                if (used != item.size()) throw std::invalid_argument("Partition::parse: bad index '" + item + "'");
                b.push_back(v - 1);
            }
            if (!b.empty()) blocks.push_back(std::move(b));
        }
        return from_blocks(n, blocks);
    }

    friend bool operator==(const Partition& a, const Partition& b) { return a.block_ == b.block_; }
    friend bool operator<(const Partition& a, const Partition& b) { return a.block_ < b.block_; }

private:
    void canonicalize() {
        std::vector<int> remap;
        for (int& v : block_) {
            if (v < 0) throw std::invalid_argument("Partition: negative block id");
            if (static_cast<std::size_t>(v) >= remap.size()) remap.resize(static_cast<std::size_t>(v) + 1, -1);
            if (remap[static_cast<std::size_t>(v)] < 0) remap[static_cast<std::size_t>(v)] = static_cast<int>(nblocks_++);
            v = remap[static_cast<std::size_t>(v)];
        }
    }
    std::vector<int> block_;
    std::size_t nblocks_ = 0;
};

// Restricted-growth-string enumeration, lexicographic.
inline std::vector<Partition> enumerate_partitions(int n) {
    if (n < 1 || n > 10) throw std::invalid_argument("enumerate_partitions: n must be in [1, 10]");
    std::vector<Partition> out;
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, std::size_t i, int maxb) -> void {
        if (i == a.size()) {
            out.emplace_back(a);
            return;
        }
        for (int b = 0; b <= maxb + 1; ++b) {
            a[i] = b;
            self(self, i + 1, std::max(maxb, b));
        }
    };
    a[0] = 0;
    rec(rec, 1, 0);
    return out;
}

inline std::vector<Partition> enumerate_pairings(int n) {
    if (n < 2 || n > 10 || n % 2) throw std::invalid_argument("enumerate_pairings: n must be even in [2, 10]");
    std::vector<Partition> out;
    std::vector<int> a(static_cast<std::size_t>(n), -1);
    auto rec = [&](auto&& self, int next_id) -> void {
        auto it = std::find(a.begin(), a.end(), -1);
        if (it == a.end()) {
            out.emplace_back(a);
            return;
        }
        const std::size_t i = static_cast<std::size_t>(it - a.begin());
        a[i] = next_id;
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            if (a[j] != -1) continue;
            a[j] = next_id;
            self(self, next_id + 1);
            a[j] = -1;
        }
        a[i] = -1;
    };
    rec(rec, 0);
    return out;
}

inline Partition join(const Partition& a, const Partition& b) {
    if (a.size() != b.size()) throw std::invalid_argument("join: ground-set mismatch");
    const std::size_t n = a.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](std::size_t x, std::size_t y) { parent[find(x)] = find(y); };
    for (const Partition* p : {&a, &b}) {
        std::vector<int> first(p->num_blocks(), -1);
        for (std::size_t i = 0; i < n; ++i) {
            int& f = first[static_cast<std::size_t>(p->block_of(i))];
            if (f < 0) f = static_cast<int>(i);
            else unite(i, static_cast<std::size_t>(f));
        }
    }
    std::vector<int> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(find(i));
    return Partition(std::move(ids));
}

class PairPartitionDiagram {
public:
    PairPartitionDiagram(Partition delta, Partition pairing)
        : delta_(std::move(delta)), pairing_(std::move(pairing)) {
        if (delta_.size() != pairing_.size()) throw std::invalid_argument("PairPartitionDiagram: ground-set mismatch");
        if (!pairing_.is_pairing()) throw std::invalid_argument("PairPartitionDiagram: p must consist of pairs");
        join_ = join(delta_, pairing_);
    }

    // "delta=1,2;3,4 p=1,3;2,4"
    static PairPartitionDiagram parse(const std::string& text) {
        std::stringstream ss(text);
        std::string tok, dtext, ptext;
        while (ss >> tok) {
            if (tok.rfind("delta=", 0) == 0) dtext = tok.substr(6);
            else if (tok.rfind("p=", 0) == 0) ptext = tok.substr(2);
            else throw std::invalid_argument("diagram literal: unexpected token '" + tok + "'");
        }
        if (dtext.empty() || ptext.empty()) throw std::invalid_argument("diagram literal needs delta= and p=");
        int n = 0;
        for (const std::string* s : {&dtext, &ptext}) {
            std::string cur;
            for (char ch : *s + ";") {
                if (ch == ',' || ch == ';') {
                    if (!cur.empty()) n = std::max(n, std::stoi(cur));
                    cur.clear();
                } else {
                    cur += ch;
                }
            }
        }
        return {Partition::parse(static_cast<std::size_t>(n), dtext), Partition::parse(static_cast<std::size_t>(n), ptext)};
    }

    std::size_t size() const noexcept { return delta_.size(); }
    const Partition& delta() const noexcept { return delta_; }
    const Partition& pairing() const noexcept { return pairing_; }
    const Partition& joined() const noexcept { return join_; }
    bool connected() const noexcept { return join_.num_blocks() == 1; }
    std::size_t num_singletons() const { return delta_.singleton_blocks().size(); }
    std::vector<std::vector<int>> singletons() const { return delta_.singleton_blocks(); }
    std::string to_string() const { return "delta=" + delta_.to_string() + " p=" + pairing_.to_string(); }

    // Diagram restricted to a union of join-blocks, relabelled in increasing order.
    PairPartitionDiagram restricted(const std::vector<int>& subset) const {
        std::vector<int> sorted(subset);
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> d, p;
        for (int i : sorted) {
            d.push_back(delta_.block_of(static_cast<std::size_t>(i)));
            p.push_back(pairing_.block_of(static_cast<std::size_t>(i)));
        }
        return {Partition(std::move(d)), Partition(std::move(p))};
    }

private:
    Partition delta_;
    Partition pairing_;
    Partition join_;
};

inline std::vector<PairPartitionDiagram> connected_pair_diagrams(int n, bool allow_singletons) {
    if (n < 2 || n > 8 || n % 2) throw std::invalid_argument("connected_pair_diagrams: n must be even in [2, 8]");
    std::vector<PairPartitionDiagram> out;
    const auto parts = enumerate_partitions(n);
    const auto pairs = enumerate_pairings(n);
    for (const auto& d : parts) {
        if (!allow_singletons && !d.singleton_blocks().empty()) continue;
        for (const auto& p : pairs) {
            PairPartitionDiagram g(d, p);
            if (g.connected()) out.push_back(std::move(g));
        }
    }
    return out;
}

inline std::uint64_t bell_number(int n) {
    std::vector<std::vector<std::uint64_t>> t{{1}};
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> row{t.back().back()};
        for (auto v : t.back()) row.push_back(row.back() + v);
        t.push_back(std::move(row));
    }
    return t[static_cast<std::size_t>(n)][0];
}

inline std::uint64_t double_factorial(int n) {
    std::uint64_t r = 1;
    for (int k = n; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
    return r;
}

}  // namespace fracfluct
