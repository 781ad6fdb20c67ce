#include "tcmap/compression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace tcmap {

namespace {

template <typename S>
diff::TensorT<S> reshaped(const diff::TensorT<S>& t, std::vector<int> shape) {
    if (diff::TensorT<S>::count(shape) != t.size())
        throw ValidationError("reshape: element count mismatch");
    diff::TensorT<S> out;
    out.shape = std::move(shape);
    out.data = t.data;
    return out;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

template <typename S>
CompressOutputT<S> compress_forward(const diff::TensorT<S>& embeddings,
                                    const CompressionNetT<S>& net) {
    if (embeddings.shape.size() != 4)
        throw ValidationError("compress_forward expects [B, N, H, W]");
    const int B = embeddings.dim(0), N = embeddings.dim(1);
    const int H = embeddings.dim(2), W = embeddings.dim(3);
    if (N != net.n_embeddings)
        throw ValidationError("embedding count " + std::to_string(N) +
                              " does not match network N = " + std::to_string(net.n_embeddings));
    if (H < 4 || W < 4)
        throw ValidationError("spatial dims below the conv stack minimum (4x4)");

    CompressOutputT<S> out;
    CompressCacheT<S>& cache = out.cache;
    cache.embeddings = embeddings;

    // (1)-(2): shared CNN over each embedding as a single-channel image.
    cache.scaled = reshaped(embeddings, {B * N, 1, H, W});
    for (auto& v : cache.scaled.data) v = static_cast<S>(v / S(255));
    cache.a1 = diff::conv2d_forward(cache.scaled, net.conv1);
    cache.r1 = diff::relu(cache.a1);
    cache.a2 = diff::conv2d_forward(cache.r1, net.conv2);
    cache.r2 = diff::relu(cache.a2);

    // (3): per-channel layer norm + global average pooling.
    diff::TensorT<S> normed = diff::layer_norm(cache.r2, net.ln_gain, net.ln_bias, &cache.ln);
    diff::TensorT<S> pooled = diff::global_avg_pool(normed);  // [B*N, 3]

    // (4): concatenate to [B, 3N] (same memory layout) and run the MLP head.
    cache.feat = reshaped(pooled, {B, 3 * N});
    cache.d1 = diff::dense_forward(cache.feat, net.mlp1);
    cache.h1 = diff::relu(cache.d1);
    cache.d2 = diff::dense_forward(cache.h1, net.mlp2);
    cache.h2 = diff::relu(cache.d2);
    diff::TensorT<S> logits = diff::dense_forward(cache.h2, net.head);  // [B, 3N]

    // (5): 3 x N logits, softmax over the embeddings within each row.
    cache.weights = diff::softmax(reshaped(logits, {B, 3, N}), 2);

    // (6): per-channel weighted sum on the raw embeddings. Double
    // accumulation plus row renormalization keeps each output pixel inside
    // the envelope of its embeddings even after float rounding.
    cache.output = diff::TensorT<S>({B, 3, H, W});
    cache.row_sums = diff::TensorT<S>({B, 3});
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    std::vector<double> acc(plane);
    for (int b = 0; b < B; ++b)
        for (int i = 0; i < 3; ++i) {
            std::fill(acc.begin(), acc.end(), 0.0);
            double wsum = 0.0;
            for (int n = 0; n < N; ++n) {
                const double w =
                    static_cast<double>(cache.weights.data[(static_cast<std::size_t>(b) * 3 + i) * N + n]);
                wsum += w;
                const S* src =
                    embeddings.data.data() + (static_cast<std::size_t>(b) * N + n) * plane;
                for (std::size_t p = 0; p < plane; ++p) acc[p] += w * static_cast<double>(src[p]);
            }
            cache.row_sums.data[static_cast<std::size_t>(b) * 3 + i] = static_cast<S>(wsum);
            S* dst = cache.output.data.data() + (static_cast<std::size_t>(b) * 3 + i) * plane;
            for (std::size_t p = 0; p < plane; ++p) dst[p] = static_cast<S>(acc[p] / wsum);
        }

    out.tonemapped = cache.output;
    out.weights = cache.weights;
    return out;
}

template <typename S>
diff::TensorT<S> compress_backward(const diff::TensorT<S>& grad_out, CompressionNetT<S>& net,
                                   const CompressCacheT<S>& cache) {
    if (cache.embeddings.shape.empty())
        throw ValidationError("compress_backward: cache is empty (no matching forward)");
    const int B = cache.embeddings.dim(0), N = cache.embeddings.dim(1);
    const int H = cache.embeddings.dim(2), W = cache.embeddings.dim(3);
    grad_out.require_shape({B, 3, H, W}, "compress_backward grad_out");

    const std::size_t plane = static_cast<std::size_t>(H) * W;
    diff::TensorT<S> grad_emb({B, N, H, W});
    diff::TensorT<S> grad_w({B, 3, N});

    // (6) backward: out = sum_n w_n E_n / s with s the softmax row sum.
    for (int b = 0; b < B; ++b)
        for (int i = 0; i < 3; ++i) {
            const std::size_t row = static_cast<std::size_t>(b) * 3 + i;
            const S s = cache.row_sums.data[row];
            const S* gy = grad_out.data.data() + row * plane;
            const S* outp = cache.output.data.data() + row * plane;
            for (int n = 0; n < N; ++n) {
                const S w = cache.weights.data[row * N + n];
                const S* e = cache.embeddings.data.data() + (static_cast<std::size_t>(b) * N + n) * plane;
                S* ge = grad_emb.data.data() + (static_cast<std::size_t>(b) * N + n) * plane;
                S gw_acc = S(0);
                const S winv = w / s;
                for (std::size_t p = 0; p < plane; ++p) {
                    gw_acc += gy[p] * (e[p] - outp[p]);
                    ge[p] += gy[p] * winv;
                }
                grad_w.data[row * N + n] = gw_acc / s;
            }
        }

    // (5) backward through softmax and the MLP head.
    diff::TensorT<S> glogits3 = diff::softmax_backward(cache.weights, grad_w, 2);
    diff::TensorT<S> glogits = reshaped(glogits3, {B, 3 * N});
    diff::TensorT<S> gh2 = diff::dense_backward(cache.h2, net.head, glogits);
    diff::TensorT<S> gd2 = diff::relu_backward(cache.d2, gh2);
    diff::TensorT<S> gh1 = diff::dense_backward(cache.h1, net.mlp2, gd2);
    diff::TensorT<S> gd1 = diff::relu_backward(cache.d1, gh1);
    diff::TensorT<S> gfeat = diff::dense_backward(cache.feat, net.mlp1, gd1);

    // (3)-(4) backward: pooled [B*N,3] -> layer norm -> conv stack.
    diff::TensorT<S> gpooled = reshaped(gfeat, {B * N, 3});
    const int H2 = cache.r2.dim(2), W2 = cache.r2.dim(3);
    diff::TensorT<S> gnormed = diff::gap_backward(gpooled, H2, W2);
    diff::TensorT<S> gr2 = diff::layer_norm_backward(cache.ln, net.ln_gain, net.ln_bias, gnormed);
    diff::TensorT<S> ga2 = diff::relu_backward(cache.a2, gr2);
    diff::TensorT<S> gr1 = diff::conv2d_backward(cache.r1, net.conv2, ga2);
    diff::TensorT<S> ga1 = diff::relu_backward(cache.a1, gr1);
    diff::TensorT<S> gscaled = diff::conv2d_backward(cache.scaled, net.conv1, ga1);

    // (1) backward: the CNN path saw embeddings / 255.
    for (std::size_t i = 0; i < grad_emb.data.size(); ++i)
        grad_emb.data[i] += gscaled.data[i] / S(255);
    return grad_emb;
}

template CompressOutputT<float> compress_forward<float>(const diff::TensorT<float>&,
                                                        const CompressionNetT<float>&);
template CompressOutputT<double> compress_forward<double>(const diff::TensorT<double>&,
                                                          const CompressionNetT<double>&);
template diff::TensorT<float> compress_backward<float>(const diff::TensorT<float>&,
                                                       CompressionNetT<float>&,
                                                       const CompressCacheT<float>&);
template diff::TensorT<double> compress_backward<double>(const diff::TensorT<double>&,
                                                         CompressionNetT<double>&,
                                                         const CompressCacheT<double>&);

std::vector<double> CompressionWeights::per_embedding_average() const {
    std::vector<double> avg(n, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < n; ++c) avg[c] += at(i, c) / 3.0;
    return avg;
}

diff::TensorT<float> make_embedding_batch(const std::vector<ThermalEmbedding>& embs) {
    if (embs.empty()) throw ValidationError("empty embedding batch");
    const int N = embs[0].channels, H = embs[0].height, W = embs[0].width;
    for (const auto& e : embs)
        if (e.channels != N || e.height != H || e.width != W)
            throw ValidationError("embedding batch members disagree on N/H/W");
    diff::TensorT<float> batch({static_cast<int>(embs.size()), N, H, W});
    const std::size_t per = static_cast<std::size_t>(N) * H * W;
    for (std::size_t b = 0; b < embs.size(); ++b)
        std::copy(embs[b].data.begin(), embs[b].data.end(), batch.data.begin() + b * per);
    return batch;
}

CompressionWeights weights_from_tensor(const diff::TensorT<float>& weights, int batch_index) {
    const int N = weights.dim(2);
    CompressionWeights w;
    w.n = N;
    w.omega.resize(static_cast<std::size_t>(3) * N);
    const std::size_t off = static_cast<std::size_t>(batch_index) * 3 * N;
    std::copy(weights.data.begin() + off, weights.data.begin() + off + 3 * N, w.omega.begin());
    return w;
}

CompressResult compress_image(const ThermalEmbedding& emb, const CompressionNetT<float>& net) {
    auto batch = make_embedding_batch({emb});
    auto fwd = compress_forward(batch, net);
    CompressResult res;
    res.image.width = emb.width;
    res.image.height = emb.height;
    res.image.data.assign(fwd.tonemapped.data.begin(), fwd.tonemapped.data.end());
    res.weights = weights_from_tensor(fwd.weights, 0);
    return res;
}

int WeightReport::min_average_index() const {
    return static_cast<int>(std::min_element(embedding_average.begin(), embedding_average.end()) -
                            embedding_average.begin());
}

WeightReport inspect_weights(const CompressionWeights& weights, const PeriodSet& periods) {
    if (weights.n != periods.size())
        throw ValidationError("weight matrix has " + std::to_string(weights.n) +
                              " columns but period set has " + std::to_string(periods.size()));
    std::vector<int> order(weights.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return periods.periods[a] < periods.periods[b];
    });

    WeightReport rep;
    rep.periods.reserve(weights.n);
    for (int idx : order) rep.periods.push_back(periods.periods[idx]);
    for (int i = 0; i < 3; ++i) {
        rep.omega_rows[i].reserve(weights.n);
        for (int idx : order) rep.omega_rows[i].push_back(weights.at(i, idx));
    }
    rep.embedding_average.assign(weights.n, 0.0);
    for (int c = 0; c < weights.n; ++c)
        rep.embedding_average[c] =
            (rep.omega_rows[0][c] + rep.omega_rows[1][c] + rep.omega_rows[2][c]) / 3.0;
    return rep;
}

std::string weight_report_csv(const WeightReport& report) {
    static const char* kChannels[3] = {"R", "G", "B"};
    std::ostringstream out;
    out << "channel,D,omega\n";
    for (int i = 0; i < 3; ++i)
        for (std::size_t c = 0; c < report.periods.size(); ++c)
            out << kChannels[i] << "," << format_number(report.periods[c]) << ","
                << format_number(report.omega_rows[i][c]) << "\n";
    for (std::size_t c = 0; c < report.periods.size(); ++c)
        out << "avg," << format_number(report.periods[c]) << ","
            << format_number(report.embedding_average[c]) << "\n";
    return out.str();
}

std::string weight_report_table(const WeightReport& report) {
    static const char* kChannels[3] = {"R", "G", "B"};
    std::ostringstream out;
    out << "channel";
    for (double d : report.periods) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "  D=%-8.4g", d);
        out << buf;
    }
    out << "\n";
    for (int i = 0; i < 3; ++i) {
        out << kChannels[i] << "      ";
        for (double w : report.omega_rows[i]) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "  %-10.4f", w);
            out << buf;
        }
        out << "\n";
    }
    out << "avg    ";
    for (double a : report.embedding_average) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "  %-10.4f", a);
        out << buf;
    }
    out << "\n";
    return out.str();
}

std::pair<CompressionWeights, PeriodSet> weights_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("channel,D,omega", 0) != 0)
        throw ValidationError("weight CSV must start with header 'channel,D,omega'");

    std::array<std::vector<std::pair<double, double>>, 3> rows;  // (D, omega) per channel
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string channel, d_str, w_str;
        if (!std::getline(ls, channel, ',') || !std::getline(ls, d_str, ',') ||
            !std::getline(ls, w_str))
            throw ValidationError("malformed weight CSV line: " + line);
        int idx = channel == "R" ? 0 : channel == "G" ? 1 : channel == "B" ? 2 : -1;
        if (idx < 0) {
            if (channel == "avg") continue;
            throw ValidationError("unknown channel '" + channel + "' in weight CSV");
        }
        rows[idx].emplace_back(std::stod(d_str), std::stod(w_str));
    }
    const std::size_t n = rows[0].size();
    if (n == 0) throw ValidationError("weight CSV holds no data rows");
    for (int i = 1; i < 3; ++i) {
        if (rows[i].size() != n)
            throw ValidationError("weight CSV channels disagree on embedding count");
        for (std::size_t c = 0; c < n; ++c)
            if (rows[i][c].first != rows[0][c].first)
                throw ValidationError("weight CSV channels disagree on period order");
    }

    CompressionWeights w;
    w.n = static_cast<int>(n);
    w.omega.resize(3 * n);
    PeriodSet periods;
    for (std::size_t c = 0; c < n; ++c) periods.periods.push_back(rows[0][c].first);
    for (int i = 0; i < 3; ++i)
        for (std::size_t c = 0; c < n; ++c)
            w.omega[i * n + c] = static_cast<float>(rows[i][c].second);
    periods.validate();
    return {w, periods};
}

} // namespace tcmap
