#include "nn.hpp"

#include "windfc/common.hpp"

#include <cmath>

namespace windfc::models::nn {

namespace {

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = uniform_range(rng, -limit, limit);
        }
    }
    return m;
}

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& a) {
    return 1.0 / (1.0 + (-a).exp());
}

} // namespace

ParamList zeros_like(const ParamList& params) {
    ParamList out;
    out.reserve(params.size());
    for (const auto& p : params) out.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    return out;
}

ParamList fcnn_init(const std::vector<int>& sizes, std::mt19937_64& rng) {
    ParamList params;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        params.push_back(glorot(sizes[l + 1], sizes[l], rng));
        params.push_back(Eigen::MatrixXd::Zero(sizes[l + 1], 1));
    }
    return params;
}

Eigen::RowVectorXd fcnn_forward(const ParamList& params, const Eigen::MatrixXd& X) {
    Eigen::MatrixXd a = X;
    const std::size_t layers = params.size() / 2;
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = (params[2 * l] * a).colwise() + params[2 * l + 1].col(0);
        if (l + 1 < layers) {
            a = z.cwiseMax(0.0);
        } else {
            a = std::move(z);
        }
    }
    return a.row(0);
}

double fcnn_backward(const ParamList& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     ParamList& grads) {
    const std::size_t layers = params.size() / 2;
    const Eigen::Index B = X.cols();

    std::vector<Eigen::MatrixXd> acts(layers + 1); // acts[0] = input
    acts[0] = X;
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = (params[2 * l] * acts[l]).colwise() + params[2 * l + 1].col(0);
        acts[l + 1] = (l + 1 < layers) ? z.cwiseMax(0.0).eval() : z;
    }

    const Eigen::RowVectorXd pred = acts[layers].row(0);
    double sse = 0.0;
    for (Eigen::Index b = 0; b < B; ++b) {
        const double e = y[b] - pred[b];
        sse += e * e;
    }

    // delta of the mean squared-error loss w.r.t. the layer input z
    Eigen::MatrixXd delta =
        (2.0 / static_cast<double>(B)) * (acts[layers].row(0) - y.transpose());
    for (std::size_t l = layers; l-- > 0;) {
        grads[2 * l] = delta * acts[l].transpose();
        grads[2 * l + 1] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd mask = (acts[l].array() > 0.0).cast<double>();
            delta = (params[2 * l].transpose() * delta).cwiseProduct(mask);
        }
    }
    return sse;
}

ParamList gru_init(int input_dim, int hidden, std::mt19937_64& rng) {
    ParamList params;
    for (int gate = 0; gate < 3; ++gate) {
        params.push_back(glorot(hidden, input_dim, rng)); // W
        params.push_back(glorot(hidden, hidden, rng));    // U
        params.push_back(Eigen::MatrixXd::Zero(hidden, 1)); // b
    }
    params.push_back(glorot(1, hidden, rng));   // head_w
    params.push_back(Eigen::MatrixXd::Zero(1, 1)); // head_b
    return params;
}

namespace {

struct GruTrace {
    std::vector<Eigen::MatrixXd> z, r, c, h; // one entry per step, hidden x B
};

Eigen::RowVectorXd gru_run(const ParamList& params, const std::vector<Eigen::MatrixXd>& xsteps,
                           GruTrace* trace) {
    const auto& Wz = params[0];
    const auto& Uz = params[1];
    const auto& bz = params[2];
    const auto& Wr = params[3];
    const auto& Ur = params[4];
    const auto& br = params[5];
    const auto& Wc = params[6];
    const auto& Uc = params[7];
    const auto& bc = params[8];
    const auto& head_w = params[9];
    const auto& head_b = params[10];

    const Eigen::Index h = Wz.rows();
    const Eigen::Index B = xsteps.front().cols();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(h, B);
    if (trace) {
        const std::size_t P = xsteps.size();
        trace->z.resize(P);
        trace->r.resize(P);
        trace->c.resize(P);
        trace->h.resize(P);
    }
    for (std::size_t t = 0; t < xsteps.size(); ++t) {
        const auto& X = xsteps[t];
        Eigen::MatrixXd z = sigmoid(((Wz * X + Uz * H).colwise() + bz.col(0)).array()).matrix();
        Eigen::MatrixXd r = sigmoid(((Wr * X + Ur * H).colwise() + br.col(0)).array()).matrix();
        Eigen::MatrixXd c =
            ((Wc * X + Uc * (r.cwiseProduct(H))).colwise() + bc.col(0)).array().tanh().matrix();
        Eigen::MatrixXd Hn =
            ((1.0 - z.array()) * H.array() + z.array() * c.array()).matrix();
        if (trace) {
            trace->z[t] = std::move(z);
            trace->r[t] = std::move(r);
            trace->c[t] = std::move(c);
            trace->h[t] = Hn;
        }
        H = std::move(Hn);
    }
    Eigen::RowVectorXd pred = (head_w * H).row(0);
    pred.array() += head_b(0, 0);
    return pred;
}

} // namespace

Eigen::RowVectorXd gru_forward(const ParamList& params, const std::vector<Eigen::MatrixXd>& xsteps) {
    return gru_run(params, xsteps, nullptr);
}

double gru_backward(const ParamList& params, const std::vector<Eigen::MatrixXd>& xsteps,
                    const Eigen::VectorXd& y, ParamList& grads) {
    const auto& Uz = params[1];
    const auto& Ur = params[4];
    const auto& Uc = params[7];
    const auto& head_w = params[9];

    GruTrace trace;
    const Eigen::RowVectorXd pred = gru_run(params, xsteps, &trace);
    const std::size_t P = xsteps.size();
    const Eigen::Index h = Uz.rows();
    const Eigen::Index B = xsteps.front().cols();

    double sse = 0.0;
    for (Eigen::Index b = 0; b < B; ++b) {
        const double e = y[b] - pred[b];
        sse += e * e;
    }

    for (auto& g : grads) g.setZero();

    const Eigen::RowVectorXd dpred = (2.0 / static_cast<double>(B)) * (pred - y.transpose());
    grads[9] = dpred * trace.h[P - 1].transpose(); // head_w
    grads[10](0, 0) = dpred.sum();                 // head_b

    Eigen::MatrixXd dH = head_w.transpose() * dpred;
    const Eigen::MatrixXd zero_h = Eigen::MatrixXd::Zero(h, B);
    for (std::size_t t = P; t-- > 0;) {
        const Eigen::MatrixXd& Hprev = (t == 0) ? zero_h : trace.h[t - 1];
        const auto& z = trace.z[t];
        const auto& r = trace.r[t];
        const auto& c = trace.c[t];

        Eigen::MatrixXd dz = dH.cwiseProduct(c - Hprev);
        Eigen::MatrixXd dc = dH.cwiseProduct(z);
        Eigen::MatrixXd dac = (dc.array() * (1.0 - c.array().square())).matrix();
        Eigen::MatrixXd daz = (dz.array() * z.array() * (1.0 - z.array())).matrix();

        Eigen::MatrixXd drh = Uc.transpose() * dac;
        Eigen::MatrixXd dr = drh.cwiseProduct(Hprev);
        Eigen::MatrixXd dar = (dr.array() * r.array() * (1.0 - r.array())).matrix();

        grads[0] += daz * xsteps[t].transpose();               // Wz
        grads[1] += daz * Hprev.transpose();                   // Uz
        grads[2].col(0) += daz.rowwise().sum();                // bz
        grads[3] += dar * xsteps[t].transpose();               // Wr
        grads[4] += dar * Hprev.transpose();                   // Ur
        grads[5].col(0) += dar.rowwise().sum();                // br
        grads[6] += dac * xsteps[t].transpose();               // Wc
        grads[7] += dac * (r.cwiseProduct(Hprev)).transpose(); // Uc
        grads[8].col(0) += dac.rowwise().sum();                // bc

        dH = (dH.array() * (1.0 - z.array())).matrix() + Uz.transpose() * daz +
             Ur.transpose() * dar + drh.cwiseProduct(r);
    }
    return sse;
}

} // namespace windfc::models::nn
