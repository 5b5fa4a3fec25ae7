// SPDX-License-Identifier: Apache-2.0
#include "csta/tape.hpp"

#include <algorithm>
#include <cmath>

#include "csta/errors.hpp"

namespace csta {

namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// Fixed-order dot product with four accumulators for instruction-level
// parallelism. The summation order depends only on n, so repeated runs are
// bit-identical.
double dot4(const double* a, const double* b, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 += a[i] * b[i];
        acc1 += a[i + 1] * b[i + 1];
        acc2 += a[i + 2] * b[i + 2];
        acc3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) acc0 += a[i] * b[i];
    return (acc0 + acc1) + (acc2 + acc3);
}

std::vector<std::size_t> row_major_strides(const Shape& shape) {
    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t d = shape.size(); d-- > 1;) {
        strides[d - 1] = strides[d] * shape[d];
    }
    return strides;
}

} // namespace

void Tape::check_id(Var v) const {
    if (v.id >= nodes_.size()) throw ContractError("Var does not belong to this tape");
}

const Tensor& Tape::val(std::size_t id) const {
    const Node& n = nodes_[id];
    if (n.external) return *n.external;
    if (n.external_const) return *n.external_const;
    return n.owned;
}

const Tensor& Tape::value(Var v) const {
    check_id(v);
    return val(v.id);
}

std::span<const double> Tape::grad_of(Var v) const {
    check_id(v);
    return nodes_[v.id].grad;
}

std::vector<double>& Tape::grad_buffer(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) n.grad.assign(val(id).size(), 0.0);
    return n.grad;
}

Var Tape::leaf(Tensor& tensor) {
    Node n;
    n.external = &tensor;
    n.needs_grad = tensor.requires_grad();
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

Var Tape::observe(const Tensor& tensor) {
    Node n;
    n.external_const = &tensor;
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
    Node n;
    n.owned = std::move(value);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

Var Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
    Node n;
    n.owned = std::move(value);
    n.needs_grad = needs_grad;
    if (needs_grad) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

void Tape::backward(Var loss) {
    check_id(loss);
    if (value(loss).size() != 1) {
        throw ContractError("backward requires a scalar loss, got shape " +
                            shape_to_string(value(loss).shape()));
    }
    // Node grads reset on every sweep, so repeated sweeps are bit-identical.
    for (Node& n : nodes_) n.grad.clear();
    grad_buffer(loss.id)[0] = 1.0;
    for (std::size_t id = loss.id + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (n.grad.empty()) continue; // not an ancestor of the loss
        if (n.back) n.back(*this);
    }
    for (std::size_t id = 0; id <= loss.id; ++id) {
        Node& n = nodes_[id];
        if (n.external && n.external->requires_grad() && !n.grad.empty()) {
            n.external->accumulate_grad(n.grad);
        }
    }
}

// -- operations ---------------------------------------------------------

Var Tape::matmul(Var a, Var b) {
    check_id(a);
    check_id(b);
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.rank() != 2 || B.rank() != 2 || A.dim(1) != B.dim(0)) {
        throw DimensionError("matmul: incompatible shapes " + shape_to_string(A.shape()) +
                             " and " + shape_to_string(B.shape()));
    }
    const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
    Tensor C({m, n});
    {
        const double* ap = A.data().data();
        const double* bp = B.data().data();
        double* cp = C.data().data();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
                const double aip = ap[i * k + p];
                const double* brow = bp + p * n;
                double* crow = cp + i * n;
                for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
            }
        }
    }
    const bool track = needs(a.id) || needs(b.id);
    const std::size_t aid = a.id, bid = b.id, oid = nodes_.size();
    return push(std::move(C), track, [aid, bid, oid, m, k, n](Tape& t) {
        const std::vector<double>& dC = t.nodes_[oid].grad;
        const Tensor& A = t.val(aid);
        const Tensor& B = t.val(bid);
        if (t.needs(aid)) {
            std::vector<double>& dA = t.grad_buffer(aid);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t p = 0; p < k; ++p) {
                    dA[i * k + p] += dot4(dC.data() + i * n, B.data().data() + p * n, n);
                }
            }
        }
        if (t.needs(bid)) {
            std::vector<double>& dB = t.grad_buffer(bid);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t p = 0; p < k; ++p) {
                    const double aip = A[i * k + p];
                    const double* drow = dC.data() + i * n;
                    double* brow = dB.data() + p * n;
                    for (std::size_t j = 0; j < n; ++j) brow[j] += aip * drow[j];
                }
            }
        }
    });
}

Var Tape::outer_product(Var u, Var v) {
    check_id(u);
    check_id(v);
    const Tensor& U = value(u);
    const Tensor& V = value(v);
    if (U.rank() != 1 || V.rank() != 1) {
        throw DimensionError("outer_product: rank-1 vectors required, got " +
                             shape_to_string(U.shape()) + " and " + shape_to_string(V.shape()));
    }
    const std::size_t p = U.size(), q = V.size();
    Tensor M({p, q});
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < q; ++j) M[i * q + j] = U[i] * V[j];
    }
    const bool track = needs(u.id) || needs(v.id);
    const std::size_t uid = u.id, vid = v.id, oid = nodes_.size();
    return push(std::move(M), track, [uid, vid, oid, p, q](Tape& t) {
        const std::vector<double>& dM = t.nodes_[oid].grad;
        const Tensor& U = t.val(uid);
        const Tensor& V = t.val(vid);
        if (t.needs(uid)) {
            std::vector<double>& dU = t.grad_buffer(uid);
            for (std::size_t i = 0; i < p; ++i) {
                dU[i] += dot4(dM.data() + i * q, V.data().data(), q);
            }
        }
        if (t.needs(vid)) {
            std::vector<double>& dV = t.grad_buffer(vid);
            for (std::size_t i = 0; i < p; ++i) {
                const double ui = U[i];
                const double* drow = dM.data() + i * q;
                for (std::size_t j = 0; j < q; ++j) dV[j] += ui * drow[j];
            }
        }
    });
}

Var Tape::elementwise_mul(Var a, Var b) {
    check_id(a);
    check_id(b);
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    const bool same = A.shape() == B.shape();
    // The only supported broadcast: b spans all but a trailing axis of size 3.
    const bool channel_broadcast =
        !same && A.rank() == B.rank() + 1 && A.dim(A.rank() - 1) == 3 &&
        Shape(A.shape().begin(), A.shape().end() - 1) == B.shape();
    if (!same && !channel_broadcast) {
        throw DimensionError("elementwise_mul: incompatible shapes " +
                             shape_to_string(A.shape()) + " and " + shape_to_string(B.shape()));
    }
    Tensor O(A.shape());
    if (same) {
        for (std::size_t i = 0; i < A.size(); ++i) O[i] = A[i] * B[i];
    } else {
        for (std::size_t i = 0; i < B.size(); ++i) {
            for (std::size_t c = 0; c < 3; ++c) O[i * 3 + c] = A[i * 3 + c] * B[i];
        }
    }
    const bool track = needs(a.id) || needs(b.id);
    const std::size_t aid = a.id, bid = b.id, oid = nodes_.size();
    return push(std::move(O), track, [aid, bid, oid, same](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        const Tensor& A = t.val(aid);
        const Tensor& B = t.val(bid);
        if (same) {
            if (t.needs(aid)) {
                std::vector<double>& dA = t.grad_buffer(aid);
                for (std::size_t i = 0; i < dO.size(); ++i) dA[i] += dO[i] * B[i];
            }
            if (t.needs(bid)) {
                std::vector<double>& dB = t.grad_buffer(bid);
                for (std::size_t i = 0; i < dO.size(); ++i) dB[i] += dO[i] * A[i];
            }
        } else {
            if (t.needs(aid)) {
                std::vector<double>& dA = t.grad_buffer(aid);
                for (std::size_t i = 0; i < B.size(); ++i) {
                    for (std::size_t c = 0; c < 3; ++c) dA[i * 3 + c] += dO[i * 3 + c] * B[i];
                }
            }
            if (t.needs(bid)) {
                std::vector<double>& dB = t.grad_buffer(bid);
                for (std::size_t i = 0; i < B.size(); ++i) {
                    double s = 0.0;
                    for (std::size_t c = 0; c < 3; ++c) s += dO[i * 3 + c] * A[i * 3 + c];
                    dB[i] += s;
                }
            }
        }
    });
}

Var Tape::add(Var a, Var b) {
    check_id(a);
    check_id(b);
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.shape() != B.shape()) {
        throw DimensionError("add: incompatible shapes " + shape_to_string(A.shape()) +
                             " and " + shape_to_string(B.shape()));
    }
    Tensor O(A.shape());
    for (std::size_t i = 0; i < A.size(); ++i) O[i] = A[i] + B[i];
    const bool track = needs(a.id) || needs(b.id);
    const std::size_t aid = a.id, bid = b.id, oid = nodes_.size();
    return push(std::move(O), track, [aid, bid, oid](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        if (t.needs(aid)) {
            std::vector<double>& dA = t.grad_buffer(aid);
            for (std::size_t i = 0; i < dO.size(); ++i) dA[i] += dO[i];
        }
        if (t.needs(bid)) {
            std::vector<double>& dB = t.grad_buffer(bid);
            for (std::size_t i = 0; i < dO.size(); ++i) dB[i] += dO[i];
        }
    });
}

Var Tape::scale(Var x, double factor) {
    check_id(x);
    const Tensor& X = value(x);
    Tensor O(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i) O[i] = factor * X[i];
    const std::size_t xid = x.id, oid = nodes_.size();
    return push(std::move(O), needs(x.id), [xid, oid, factor](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        std::vector<double>& dX = t.grad_buffer(xid);
        for (std::size_t i = 0; i < dO.size(); ++i) dX[i] += factor * dO[i];
    });
}

Var Tape::sum(Var x) {
    check_id(x);
    const Tensor& X = value(x);
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    const std::size_t n = X.size();
    for (; i + 4 <= n; i += 4) {
        acc0 += X[i];
        acc1 += X[i + 1];
        acc2 += X[i + 2];
        acc3 += X[i + 3];
    }
    for (; i < n; ++i) acc0 += X[i];
    const std::size_t xid = x.id, oid = nodes_.size();
    return push(Tensor::scalar((acc0 + acc1) + (acc2 + acc3)), needs(x.id),
                [xid, oid](Tape& t) {
                    const double seed = t.nodes_[oid].grad[0];
                    std::vector<double>& dX = t.grad_buffer(xid);
                    for (double& g : dX) g += seed;
                });
}

Var Tape::sigmoid(Var x) {
    check_id(x);
    const Tensor& X = value(x);
    Tensor O(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i) O[i] = stable_sigmoid(X[i]);
    const std::size_t xid = x.id, oid = nodes_.size();
    return push(std::move(O), needs(x.id), [xid, oid](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        const Tensor& Y = t.val(oid);
        std::vector<double>& dX = t.grad_buffer(xid);
        for (std::size_t i = 0; i < dO.size(); ++i) {
            dX[i] += dO[i] * Y[i] * (1.0 - Y[i]);
        }
    });
}

Var Tape::relu(Var x) {
    check_id(x);
    const Tensor& X = value(x);
    Tensor O(X.shape());
    for (std::size_t i = 0; i < X.size(); ++i) {
        min_abs_relu_input_ = std::min(min_abs_relu_input_, std::abs(X[i]));
        O[i] = X[i] > 0.0 ? X[i] : 0.0;
    }
    const std::size_t xid = x.id, oid = nodes_.size();
    return push(std::move(O), needs(x.id), [xid, oid](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        const Tensor& X = t.val(xid);
        std::vector<double>& dX = t.grad_buffer(xid);
        // subgradient at exactly 0 is 0
        for (std::size_t i = 0; i < dO.size(); ++i) {
            if (X[i] > 0.0) dX[i] += dO[i];
        }
    });
}

namespace {

struct ConvDims {
    std::size_t c_in, h, w;
    std::size_t c_out, kh, kw;
    std::size_t sh, sw, ph, pw;
    std::size_t ho, wo;
};

// Valid output-row range for a given kernel row: all oy with
// 0 <= oy*sh + ky - ph < h.
inline void out_range(std::size_t k, std::size_t pad, std::size_t stride, std::size_t in_dim,
                      std::size_t out_dim, std::size_t& lo, std::size_t& hi) {
    lo = (pad > k) ? (pad - k + stride - 1) / stride : 0;
    const std::size_t last = in_dim - 1 + pad;
    hi = (last >= k) ? std::min(out_dim, (last - k) / stride + 1) : 0;
    if (lo > hi) lo = hi;
}

void conv_forward(const double* in, const double* ker, double* out, const ConvDims& d) {
    for (std::size_t co = 0; co < d.c_out; ++co) {
        double* out_c = out + co * d.ho * d.wo;
        for (std::size_t ci = 0; ci < d.c_in; ++ci) {
            const double* in_c = in + ci * d.h * d.w;
            const double* k_c = ker + (co * d.c_in + ci) * d.kh * d.kw;
            for (std::size_t ky = 0; ky < d.kh; ++ky) {
                std::size_t oy_lo, oy_hi;
                out_range(ky, d.ph, d.sh, d.h, d.ho, oy_lo, oy_hi);
                for (std::size_t kx = 0; kx < d.kw; ++kx) {
                    const double wgt = k_c[ky * d.kw + kx];
                    std::size_t ox_lo, ox_hi;
                    out_range(kx, d.pw, d.sw, d.w, d.wo, ox_lo, ox_hi);
                    for (std::size_t oy = oy_lo; oy < oy_hi; ++oy) {
                        const std::size_t iy = oy * d.sh + ky - d.ph;
                        const double* in_row = in_c + iy * d.w;
                        double* out_row = out_c + oy * d.wo;
                        for (std::size_t ox = ox_lo; ox < ox_hi; ++ox) {
                            out_row[ox] += wgt * in_row[ox * d.sw + kx - d.pw];
                        }
                    }
                }
            }
        }
    }
}

void conv_backward_kernels(const double* in, const double* d_out, double* d_ker,
                           const ConvDims& d) {
    for (std::size_t co = 0; co < d.c_out; ++co) {
        const double* dout_c = d_out + co * d.ho * d.wo;
        for (std::size_t ci = 0; ci < d.c_in; ++ci) {
            const double* in_c = in + ci * d.h * d.w;
            double* dk_c = d_ker + (co * d.c_in + ci) * d.kh * d.kw;
            for (std::size_t ky = 0; ky < d.kh; ++ky) {
                std::size_t oy_lo, oy_hi;
                out_range(ky, d.ph, d.sh, d.h, d.ho, oy_lo, oy_hi);
                for (std::size_t kx = 0; kx < d.kw; ++kx) {
                    std::size_t ox_lo, ox_hi;
                    out_range(kx, d.pw, d.sw, d.w, d.wo, ox_lo, ox_hi);
                    double acc = 0.0;
                    for (std::size_t oy = oy_lo; oy < oy_hi; ++oy) {
                        const std::size_t iy = oy * d.sh + ky - d.ph;
                        const double* in_row = in_c + iy * d.w;
                        const double* dout_row = dout_c + oy * d.wo;
                        double s = 0.0;
                        for (std::size_t ox = ox_lo; ox < ox_hi; ++ox) {
                            s += dout_row[ox] * in_row[ox * d.sw + kx - d.pw];
                        }
                        acc += s;
                    }
                    dk_c[ky * d.kw + kx] += acc;
                }
            }
        }
    }
}

void conv_backward_input(const double* ker, const double* d_out, double* d_in,
                         const ConvDims& d) {
    for (std::size_t co = 0; co < d.c_out; ++co) {
        const double* dout_c = d_out + co * d.ho * d.wo;
        for (std::size_t ci = 0; ci < d.c_in; ++ci) {
            double* din_c = d_in + ci * d.h * d.w;
            const double* k_c = ker + (co * d.c_in + ci) * d.kh * d.kw;
            for (std::size_t ky = 0; ky < d.kh; ++ky) {
                std::size_t oy_lo, oy_hi;
                out_range(ky, d.ph, d.sh, d.h, d.ho, oy_lo, oy_hi);
                for (std::size_t kx = 0; kx < d.kw; ++kx) {
                    const double wgt = k_c[ky * d.kw + kx];
                    std::size_t ox_lo, ox_hi;
                    out_range(kx, d.pw, d.sw, d.w, d.wo, ox_lo, ox_hi);
                    for (std::size_t oy = oy_lo; oy < oy_hi; ++oy) {
                        const std::size_t iy = oy * d.sh + ky - d.ph;
                        double* din_row = din_c + iy * d.w;
                        const double* dout_row = dout_c + oy * d.wo;
                        for (std::size_t ox = ox_lo; ox < ox_hi; ++ox) {
                            din_row[ox * d.sw + kx - d.pw] += wgt * dout_row[ox];
                        }
                    }
                }
            }
        }
    }
}

} // namespace

Var Tape::conv2d(Var input, Var kernels, std::pair<std::size_t, std::size_t> stride,
                 std::pair<std::size_t, std::size_t> padding) {
    check_id(input);
    check_id(kernels);
    const Tensor& X = value(input);
    const Tensor& K = value(kernels);
    if (X.rank() != 3 || K.rank() != 4) {
        throw DimensionError("conv2d: input must be CxHxW and kernels OxCxKHxKW, got " +
                             shape_to_string(X.shape()) + " and " + shape_to_string(K.shape()));
    }
    if (X.dim(0) != K.dim(1)) {
        throw DimensionError("conv2d: input channels " + std::to_string(X.dim(0)) +
                             " do not match kernel channels " + std::to_string(K.dim(1)));
    }
    if (stride.first == 0 || stride.second == 0) {
        throw ContractError("conv2d: stride must be positive");
    }
    ConvDims d;
    d.c_in = X.dim(0);
    d.h = X.dim(1);
    d.w = X.dim(2);
    d.c_out = K.dim(0);
    d.kh = K.dim(2);
    d.kw = K.dim(3);
    d.sh = stride.first;
    d.sw = stride.second;
    d.ph = padding.first;
    d.pw = padding.second;
    if (d.kh > d.h + 2 * d.ph || d.kw > d.w + 2 * d.pw) {
        throw DimensionError("conv2d: kernel " + std::to_string(d.kh) + "x" +
                             std::to_string(d.kw) + " larger than padded input " +
                             std::to_string(d.h + 2 * d.ph) + "x" +
                             std::to_string(d.w + 2 * d.pw));
    }
    d.ho = (d.h + 2 * d.ph - d.kh) / d.sh + 1;
    d.wo = (d.w + 2 * d.pw - d.kw) / d.sw + 1;

    Tensor O({d.c_out, d.ho, d.wo});
    conv_forward(X.data().data(), K.data().data(), O.data().data(), d);

    const bool track = needs(input.id) || needs(kernels.id);
    const std::size_t xid = input.id, kid = kernels.id, oid = nodes_.size();
    return push(std::move(O), track, [xid, kid, oid, d](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        if (t.needs(kid)) {
            conv_backward_kernels(t.val(xid).data().data(), dO.data(),
                                  t.grad_buffer(kid).data(), d);
        }
        if (t.needs(xid)) {
            conv_backward_input(t.val(kid).data().data(), dO.data(),
                                t.grad_buffer(xid).data(), d);
        }
    });
}

Var Tape::channel_bias(Var x, Var bias) {
    check_id(x);
    check_id(bias);
    const Tensor& X = value(x);
    const Tensor& B = value(bias);
    if (X.rank() != 3 || B.rank() != 1 || B.size() != X.dim(0)) {
        throw DimensionError("channel_bias: expected CxHxW input and length-C bias, got " +
                             shape_to_string(X.shape()) + " and " + shape_to_string(B.shape()));
    }
    const std::size_t channels = X.dim(0), plane = X.dim(1) * X.dim(2);
    Tensor O(X.shape());
    for (std::size_t c = 0; c < channels; ++c) {
        const double b = B[c];
        for (std::size_t i = 0; i < plane; ++i) O[c * plane + i] = X[c * plane + i] + b;
    }
    const bool track = needs(x.id) || needs(bias.id);
    const std::size_t xid = x.id, bid = bias.id, oid = nodes_.size();
    return push(std::move(O), track, [xid, bid, oid, channels, plane](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        if (t.needs(xid)) {
            std::vector<double>& dX = t.grad_buffer(xid);
            for (std::size_t i = 0; i < dO.size(); ++i) dX[i] += dO[i];
        }
        if (t.needs(bid)) {
            std::vector<double>& dB = t.grad_buffer(bid);
            for (std::size_t c = 0; c < channels; ++c) {
                double s = 0.0;
                for (std::size_t i = 0; i < plane; ++i) s += dO[c * plane + i];
                dB[c] += s;
            }
        }
    });
}

Var Tape::linear(Var x, Var weight, Var bias) {
    check_id(x);
    check_id(weight);
    check_id(bias);
    const Tensor& X = value(x);
    const Tensor& W = value(weight);
    const Tensor& B = value(bias);
    if (X.rank() != 1 || W.rank() != 2 || B.rank() != 1 || W.dim(1) != X.size() ||
        W.dim(0) != B.size()) {
        throw DimensionError("linear: incompatible shapes x=" + shape_to_string(X.shape()) +
                             " W=" + shape_to_string(W.shape()) +
                             " b=" + shape_to_string(B.shape()));
    }
    const std::size_t d_out = W.dim(0), d_in = W.dim(1);
    Tensor Y({d_out});
    for (std::size_t o = 0; o < d_out; ++o) {
        Y[o] = dot4(W.data().data() + o * d_in, X.data().data(), d_in) + B[o];
    }
    const bool track = needs(x.id) || needs(weight.id) || needs(bias.id);
    const std::size_t xid = x.id, wid = weight.id, bid = bias.id, oid = nodes_.size();
    return push(std::move(Y), track, [xid, wid, bid, oid, d_out, d_in](Tape& t) {
        const std::vector<double>& dY = t.nodes_[oid].grad;
        const Tensor& X = t.val(xid);
        const Tensor& W = t.val(wid);
        if (t.needs(wid)) {
            std::vector<double>& dW = t.grad_buffer(wid);
            for (std::size_t o = 0; o < d_out; ++o) {
                const double g = dY[o];
                double* row = dW.data() + o * d_in;
                const double* xp = X.data().data();
                for (std::size_t i = 0; i < d_in; ++i) row[i] += g * xp[i];
            }
        }
        if (t.needs(bid)) {
            std::vector<double>& dB = t.grad_buffer(bid);
            for (std::size_t o = 0; o < d_out; ++o) dB[o] += dY[o];
        }
        if (t.needs(xid)) {
            std::vector<double>& dX = t.grad_buffer(xid);
            for (std::size_t o = 0; o < d_out; ++o) {
                const double g = dY[o];
                const double* row = W.data().data() + o * d_in;
                for (std::size_t i = 0; i < d_in; ++i) dX[i] += g * row[i];
            }
        }
    });
}

Var Tape::softmax_cross_entropy(Var logits, std::size_t label) {
    check_id(logits);
    const Tensor& L = value(logits);
    if (L.rank() != 1 || L.size() == 0) {
        throw DimensionError("softmax_cross_entropy: logits must be a non-empty vector, got " +
                             shape_to_string(L.shape()));
    }
    if (label >= L.size()) {
        throw IndexError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(L.size()) + " classes");
    }
    double max_logit = L[0];
    for (std::size_t i = 1; i < L.size(); ++i) max_logit = std::max(max_logit, L[i]);
    double sum_exp = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i) sum_exp += std::exp(L[i] - max_logit);
    const double loss = std::log(sum_exp) - (L[label] - max_logit);
    const std::size_t lid = logits.id, oid = nodes_.size();
    return push(Tensor::scalar(loss), needs(logits.id),
                [lid, oid, label, max_logit, sum_exp](Tape& t) {
                    const double seed = t.nodes_[oid].grad[0];
                    const Tensor& L = t.val(lid);
                    std::vector<double>& dL = t.grad_buffer(lid);
                    for (std::size_t i = 0; i < L.size(); ++i) {
                        const double p = std::exp(L[i] - max_logit) / sum_exp;
                        dL[i] += seed * (p - (i == label ? 1.0 : 0.0));
                    }
                });
}

Var Tape::reshape(Var x, Shape shape) {
    check_id(x);
    const Tensor& X = value(x);
    if (shape_volume(shape) != X.size()) {
        throw DimensionError("reshape from " + shape_to_string(X.shape()) + " to " +
                             shape_to_string(shape) + ": element count mismatch");
    }
    Tensor O(std::move(shape), std::vector<double>(X.data().begin(), X.data().end()));
    const std::size_t xid = x.id, oid = nodes_.size();
    return push(std::move(O), needs(x.id), [xid, oid](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        std::vector<double>& dX = t.grad_buffer(xid);
        for (std::size_t i = 0; i < dO.size(); ++i) dX[i] += dO[i];
    });
}

Var Tape::permute(Var x, std::vector<std::size_t> axes) {
    check_id(x);
    const Tensor& X = value(x);
    const std::size_t rank = X.rank();
    if (axes.size() != rank) {
        throw DimensionError("permute: got " + std::to_string(axes.size()) +
                             " axes for tensor of rank " + std::to_string(rank));
    }
    std::vector<bool> seen(rank, false);
    for (std::size_t a : axes) {
        if (a >= rank || seen[a]) {
            throw DimensionError("permute: axes must be a permutation of 0.." +
                                 std::to_string(rank ? rank - 1 : 0));
        }
        seen[a] = true;
    }
    Shape out_shape(rank);
    for (std::size_t d = 0; d < rank; ++d) out_shape[d] = X.dim(axes[d]);
    const std::vector<std::size_t> in_strides = row_major_strides(X.shape());
    // stride each output axis advances in the input
    std::vector<std::size_t> step(rank);
    for (std::size_t d = 0; d < rank; ++d) step[d] = in_strides[axes[d]];

    Tensor O(out_shape);
    std::vector<std::size_t> idx(rank, 0);
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < O.size(); ++flat) {
        O[flat] = X[src];
        for (std::size_t d = rank; d-- > 0;) {
            ++idx[d];
            src += step[d];
            if (idx[d] < out_shape[d]) break;
            src -= step[d] * out_shape[d];
            idx[d] = 0;
        }
    }
    const std::size_t xid = x.id, oid = nodes_.size();
    return push(std::move(O), needs(x.id), [xid, oid, out_shape, step, rank](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        std::vector<double>& dX = t.grad_buffer(xid);
        std::vector<std::size_t> idx(rank, 0);
        std::size_t src = 0;
        for (std::size_t flat = 0; flat < dO.size(); ++flat) {
            dX[src] += dO[flat];
            for (std::size_t d = rank; d-- > 0;) {
                ++idx[d];
                src += step[d];
                if (idx[d] < out_shape[d]) break;
                src -= step[d] * out_shape[d];
                idx[d] = 0;
            }
        }
    });
}

Var Tape::concat(std::span<const Var> parts, std::size_t axis) {
    if (parts.empty()) throw ContractError("concat requires at least one input");
    for (Var v : parts) check_id(v);
    const Tensor& first = value(parts[0]);
    const std::size_t rank = first.rank();
    if (axis >= rank) {
        throw DimensionError("concat: axis " + std::to_string(axis) +
                             " out of range for rank " + std::to_string(rank));
    }
    Shape out_shape = first.shape();
    for (std::size_t p = 1; p < parts.size(); ++p) {
        const Tensor& t = value(parts[p]);
        if (t.rank() != rank) {
            throw DimensionError("concat: rank mismatch between " +
                                 shape_to_string(first.shape()) + " and " +
                                 shape_to_string(t.shape()));
        }
        for (std::size_t d = 0; d < rank; ++d) {
            if (d != axis && t.dim(d) != out_shape[d]) {
                throw DimensionError("concat: shapes " + shape_to_string(first.shape()) +
                                     " and " + shape_to_string(t.shape()) +
                                     " differ outside axis " + std::to_string(axis));
            }
        }
        out_shape[axis] += t.dim(axis);
    }
    std::size_t outer = 1, inner = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= out_shape[d];
    for (std::size_t d = axis + 1; d < rank; ++d) inner *= out_shape[d];

    Tensor O(out_shape);
    std::vector<std::size_t> ids(parts.size());
    std::vector<std::size_t> blocks(parts.size());
    {
        std::size_t offset = 0;
        const std::size_t out_block = out_shape[axis] * inner;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            ids[p] = parts[p].id;
            const Tensor& t = value(parts[p]);
            const std::size_t block = t.dim(axis) * inner;
            blocks[p] = block;
            for (std::size_t o = 0; o < outer; ++o) {
                for (std::size_t i = 0; i < block; ++i) {
                    O[o * out_block + offset + i] = t[o * block + i];
                }
            }
            offset += block;
        }
    }
    bool track = false;
    for (Var v : parts) track = track || needs(v.id);
    const std::size_t oid = nodes_.size();
    const std::size_t out_block = out_shape[axis] * inner;
    return push(std::move(O), track, [ids, blocks, oid, outer, out_block](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        std::size_t offset = 0;
        for (std::size_t p = 0; p < ids.size(); ++p) {
            const std::size_t block = blocks[p];
            if (t.needs(ids[p])) {
                std::vector<double>& dP = t.grad_buffer(ids[p]);
                for (std::size_t o = 0; o < outer; ++o) {
                    for (std::size_t i = 0; i < block; ++i) {
                        dP[o * block + i] += dO[o * out_block + offset + i];
                    }
                }
            }
            offset += block;
        }
    });
}

Var Tape::broadcast_channel(Var map, std::size_t channels) {
    check_id(map);
    if (channels == 0) throw ContractError("broadcast_channel requires channels >= 1");
    const Tensor& M = value(map);
    Shape out_shape = M.shape();
    out_shape.push_back(channels);
    Tensor O(out_shape);
    for (std::size_t i = 0; i < M.size(); ++i) {
        for (std::size_t c = 0; c < channels; ++c) O[i * channels + c] = M[i];
    }
    const std::size_t mid = map.id, oid = nodes_.size();
    return push(std::move(O), needs(map.id), [mid, oid, channels](Tape& t) {
        const std::vector<double>& dO = t.nodes_[oid].grad;
        std::vector<double>& dM = t.grad_buffer(mid);
        for (std::size_t i = 0; i < dM.size(); ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < channels; ++c) s += dO[i * channels + c];
            dM[i] += s;
        }
    });
}

} // namespace csta
