// Copyright 2026 The rac-forge Authors
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

#include "racforge/classical_search.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "racforge/error.h"

namespace racforge {

namespace {

std::optional<std::uint64_t> checked_power(std::uint64_t base, std::uint64_t exponent) {
    std::uint64_t out = 1;
    for (std::uint64_t i = 0; i < exponent; ++i) {
        if (out > std::numeric_limits<std::uint64_t>::max() / base) {
            return std::nullopt;
        }
        out *= base;
    }
    return out;
}

// Fixed-width counter over `base`; digit 0 is the most significant.
struct Counter {
    int base;
    std::vector<int> digits;

    Counter(int base_, std::size_t width, std::uint64_t index) : base(base_), digits(width, 0) {
        for (std::size_t k = width; k-- > 0;) {
            digits[k] = static_cast<int>(index % static_cast<std::uint64_t>(base));
            index /= static_cast<std::uint64_t>(base);
        }
    }

    // Returns the highest changed position, or width on wrap-around.
    std::size_t increment() {
        for (std::size_t k = digits.size(); k-- > 0;) {
            if (++digits[k] < base) {
                return k;
            }
            digits[k] = 0;
        }
        return digits.size();
    }
};

struct Partial {
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t first = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t count = 0;

    void consider(double value, std::uint64_t index) {
        if (value > best + kSearchTieEps) {
            best = value;
            first = index;
            count = 1;
        } else if (value >= best - kSearchTieEps) {
            ++count;
        }
    }
};

Partial merge(const std::vector<Partial> &parts) {
    Partial out;
    for (const auto &p : parts) {
        if (p.count == 0) {
            continue;
        }
        if (p.best > out.best + kSearchTieEps) {
            out = p;
        } else if (p.best >= out.best - kSearchTieEps) {
            out.count += p.count;
            out.first = std::min(out.first, p.first);
        }
    }
    return out;
}

template <typename Worker>
Partial run_partitioned(std::uint64_t total, int threads, Worker worker) {
    auto workers = static_cast<std::uint64_t>(std::max(1, threads));
    workers = std::min(workers, std::max<std::uint64_t>(1, total));
    std::vector<Partial> parts(workers);
    auto range = [&](std::uint64_t w) {
        std::uint64_t begin = total / workers * w + std::min(w, total % workers);
        std::uint64_t size = total / workers + (w < total % workers ? 1 : 0);
        return std::pair{begin, begin + size};
    };
    if (workers == 1) {
        parts[0] = worker(0, total);
    } else {
        std::vector<std::thread> pool;
        for (std::uint64_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                auto [b, e] = range(w);
                parts[w] = worker(b, e);
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    return merge(parts);
}

// c[(y * d + mu) * m + b] = sum over x with E(x) = mu of alpha_{x,y,b}.
std::vector<double> decoding_scores(const BiasTensor &t, const std::vector<int> &encoding) {
    const auto &p = t.params();
    std::vector<double> c(static_cast<std::size_t>(p.n * p.d * p.m), 0.0);
    for (std::size_t x = 0; x < encoding.size(); ++x) {
        int mu = encoding[x];
        for (int y = 0; y < p.n; ++y) {
            for (int b = 0; b < p.m; ++b) {
                c[static_cast<std::size_t>((y * p.d + mu) * p.m + b)] += t(x, y, b);
            }
        }
    }
    return c;
}

std::vector<std::vector<int>> unflatten_decodings(const ScenarioParams &p, const std::vector<int> &flat) {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(p.n));
    for (int y = 0; y < p.n; ++y) {
        out[static_cast<std::size_t>(y)].assign(flat.begin() + y * p.d, flat.begin() + (y + 1) * p.d);
    }
    return out;
}

// Best value over encodings for fixed decodings (flat layout y * d + mu).
double value_for_decodings(const BiasTensor &t, const std::vector<int> &flat) {
    const auto &p = t.params();
    double total = 0.0;
    for (std::size_t x = 0; x < p.num_strings(); ++x) {
        double best = -1.0;
        for (int mu = 0; mu < p.d; ++mu) {
            double v = 0.0;
            for (int y = 0; y < p.n; ++y) {
                v += t(x, y, flat[static_cast<std::size_t>(y * p.d + mu)]);
            }
            best = std::max(best, v);
        }
        total += best;
    }
    return total;
}

}  // namespace

void validate_strategy(const ScenarioParams &params, const ClassicalStrategy &s) {
    if (s.encoding.size() != params.num_strings() || s.decodings.size() != static_cast<std::size_t>(params.n)) {
        throw Error(ErrorCode::ShapeMismatch, "strategy tables do not match the scenario");
    }
    for (int mu : s.encoding) {
        if (mu < 0 || mu >= params.d) {
            throw Error(ErrorCode::ShapeMismatch, "encoding entry outside [0, d)");
        }
    }
    for (const auto &dec : s.decodings) {
        if (dec.size() != static_cast<std::size_t>(params.d)) {
            throw Error(ErrorCode::ShapeMismatch, "decoding table must have d entries");
        }
        for (int b : dec) {
            if (b < 0 || b >= params.m) {
                throw Error(ErrorCode::ShapeMismatch, "decoding entry outside [0, m)");
            }
        }
    }
}

namespace {

using boost::multiprecision::cpp_int;

// Correctly rounded num / den for positive integers.
double rounded_ratio(const cpp_int &num, const cpp_int &den) {
    if (num == 0) {
        return 0.0;
    }
    // Scale so the quotient carries at least 55 bits.
    const long k = 55 + static_cast<long>(msb(den)) - static_cast<long>(msb(num));
    const cpp_int scaled_num = k >= 0 ? cpp_int(num << k) : num;
    const cpp_int scaled_den = k >= 0 ? den : cpp_int(den << -k);
    cpp_int q;
    cpp_int r;
    divide_qr(scaled_num, scaled_den, q, r);
    const long extra = static_cast<long>(msb(q)) + 1 - 53;
    const cpp_int mask = (cpp_int(1) << extra) - 1;
    const cpp_int low = q & mask;
    const cpp_int half = cpp_int(1) << (extra - 1);
    q >>= extra;
    if (low > half || (low == half && (r != 0 || (q & 1) != 0))) {
        ++q;
    }
    return std::ldexp(q.convert_to<double>(), static_cast<int>(extra - k));
}

}  // namespace

double evaluate_classical(const BiasTensor &t, const ClassicalStrategy &s) {
    const auto &p = t.params();
    validate_strategy(p, s);
    // Exact binary sums of the rewarded and of all entries; the ratio is
    // rounded once, so tables with a common weight give exact fractions.
    int emin = std::numeric_limits<int>::max();
    for (double v : t.entries()) {
        if (v > 0.0) {
            int e = 0;
            std::frexp(v, &e);
            emin = std::min(emin, e - 53);
        }
    }
    if (emin == std::numeric_limits<int>::max()) {
        return 0.0;
    }
    auto scaled = [&](double v) {
        int e = 0;
        const double frac = std::frexp(v, &e);
        cpp_int mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
        return cpp_int(mant << (e - 53 - emin));
    };
    cpp_int hits = 0;
    cpp_int all = 0;
    for (double v : t.entries()) {
        if (v > 0.0) {
            all += scaled(v);
        }
    }
    for (std::size_t x = 0; x < p.num_strings(); ++x) {
        for (int y = 0; y < p.n; ++y) {
            double v = t(x, y, s.decodings[static_cast<std::size_t>(y)][static_cast<std::size_t>(s.encoding[x])]);
            if (v > 0.0) {
                hits += scaled(v);
            }
        }
    }
    return rounded_ratio(hits, all);
}

std::vector<std::vector<int>> optimal_decoding_for(const BiasTensor &t, const std::vector<int> &encoding) {
    const auto &p = t.params();
    validate_strategy(p, {encoding, std::vector<std::vector<int>>(static_cast<std::size_t>(p.n),
                                                                  std::vector<int>(static_cast<std::size_t>(p.d)))});
    auto c = decoding_scores(t, encoding);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(p.n), std::vector<int>(static_cast<std::size_t>(p.d)));
    for (int y = 0; y < p.n; ++y) {
        for (int mu = 0; mu < p.d; ++mu) {
            const double *row = &c[static_cast<std::size_t>((y * p.d + mu) * p.m)];
            out[static_cast<std::size_t>(y)][static_cast<std::size_t>(mu)] =
                static_cast<int>(std::max_element(row, row + p.m) - row);
        }
    }
    return out;
}

std::vector<int> optimal_encoding_for(const BiasTensor &t, const std::vector<std::vector<int>> &decodings) {
    const auto &p = t.params();
    validate_strategy(p, {std::vector<int>(p.num_strings(), 0), decodings});
    std::vector<int> out(p.num_strings(), 0);
    for (std::size_t x = 0; x < p.num_strings(); ++x) {
        double best = -1.0;
        for (int mu = 0; mu < p.d; ++mu) {
            double v = 0.0;
            for (int y = 0; y < p.n; ++y) {
                v += t(x, y, decodings[static_cast<std::size_t>(y)][static_cast<std::size_t>(mu)]);
            }
            if (v > best) {
                best = v;
                out[x] = mu;
            }
        }
    }
    return out;
}

std::optional<std::uint64_t> scan_count(const ScenarioParams &params, SearchMethod method) {
    params.validate();
    auto encodings = checked_power(static_cast<std::uint64_t>(params.d), params.num_strings());
    auto decodings = checked_power(static_cast<std::uint64_t>(params.m), static_cast<std::uint64_t>(params.d * params.n));
    switch (method) {
        case SearchMethod::Encodings:
            return encodings;
        case SearchMethod::Decodings:
            return decodings;
        case SearchMethod::Combined:
            if (!encodings || !decodings || *encodings > std::numeric_limits<std::uint64_t>::max() / *decodings) {
                return std::nullopt;
            }
            return *encodings * *decodings;
    }
    return std::nullopt;
}

SearchResult perform_search(const BiasTensor &t, const SearchOptions &options) {
    const auto &p = t.params();
    auto started = std::chrono::steady_clock::now();
    auto count = scan_count(p, options.method);
    if (!count || *count > options.limit) {
        std::string size = count ? std::to_string(*count) : std::string("more than 2^64");
        std::string hint = options.method == SearchMethod::Decodings ? "try --method 1" : "try --method 2";
        throw Error(ErrorCode::SearchTooLarge, "method " + std::to_string(static_cast<int>(options.method)) +
                                                   " would scan " + size + " objects (limit " +
                                                   std::to_string(options.limit) + "); " + hint);
    }
    const std::size_t strings = p.num_strings();
    const auto positions = static_cast<std::size_t>(p.n * p.d);
    const std::uint64_t dec_total = *checked_power(static_cast<std::uint64_t>(p.m), positions);

    SearchResult result;
    result.method = options.method;
    result.functions_scanned = *count;
    Partial best;

    switch (options.method) {
        case SearchMethod::Combined: {
            const std::uint64_t enc_total = *count / dec_total;
            best = run_partitioned(enc_total, options.threads, [&](std::uint64_t begin, std::uint64_t end) {
                Partial part;
                if (begin >= end) {
                    return part;
                }
                Counter enc(p.d, strings, begin);
                std::vector<double> prefix(positions + 1, 0.0);
                for (std::uint64_t e = begin; e < end; ++e) {
                    auto c = decoding_scores(t, enc.digits);
                    Counter dec(p.m, positions, 0);
                    for (std::size_t k = 0; k < positions; ++k) {
                        prefix[k + 1] = prefix[k] + c[k * static_cast<std::size_t>(p.m)];
                    }
                    for (std::uint64_t di = 0; di < dec_total; ++di) {
                        part.consider(prefix[positions], e * dec_total + di);
                        std::size_t changed = dec.increment();
                        if (changed == positions) {
                            break;
                        }
                        for (std::size_t k = changed; k < positions; ++k) {
                            prefix[k + 1] = prefix[k] + c[k * static_cast<std::size_t>(p.m) +
                                                          static_cast<std::size_t>(dec.digits[k])];
                        }
                    }
                    enc.increment();
                }
                return part;
            });
            Counter enc(p.d, strings, best.first / dec_total);
            Counter dec(p.m, positions, best.first % dec_total);
            result.witness = {enc.digits, unflatten_decodings(p, dec.digits)};
            break;
        }
        case SearchMethod::Encodings: {
            best = run_partitioned(*count, options.threads, [&](std::uint64_t begin, std::uint64_t end) {
                Partial part;
                if (begin >= end) {
                    return part;
                }
                Counter enc(p.d, strings, begin);
                for (std::uint64_t e = begin; e < end; ++e) {
                    auto c = decoding_scores(t, enc.digits);
                    double v = 0.0;
                    for (std::size_t k = 0; k < positions; ++k) {
                        const double *row = &c[k * static_cast<std::size_t>(p.m)];
                        v += *std::max_element(row, row + p.m);
                    }
                    part.consider(v, e);
                    enc.increment();
                }
                return part;
            });
            Counter enc(p.d, strings, best.first);
            result.witness = {enc.digits, optimal_decoding_for(t, enc.digits)};
            break;
        }
        case SearchMethod::Decodings: {
            best = run_partitioned(*count, options.threads, [&](std::uint64_t begin, std::uint64_t end) {
                Partial part;
                if (begin >= end) {
                    return part;
                }
                Counter dec(p.m, positions, begin);
                for (std::uint64_t di = begin; di < end; ++di) {
                    part.consider(value_for_decodings(t, dec.digits), di);
                    dec.increment();
                }
                return part;
            });
            Counter dec(p.m, positions, best.first);
            auto decodings = unflatten_decodings(p, dec.digits);
            result.witness = {optimal_encoding_for(t, decodings), decodings};
            break;
        }
    }
    result.value = evaluate_classical(t, result.witness);
    result.optimum_count = best.count;
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace racforge
