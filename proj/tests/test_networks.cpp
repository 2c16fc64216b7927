#include "doctest.h"
#include "support.hpp"

#include "dyndr/kernels.hpp"
#include "dyndr/models.hpp"
#include "dyndr/networks.hpp"

#include <cmath>
#include <random>

using namespace dyndr;

namespace {

void set(ParamStore &ps, const std::string &name, std::vector<double> values) {
	const ParamTensor *t = ps.find(name);
	REQUIRE_MESSAGE(t != nullptr, name);
	REQUIRE(t->size() == values.size());
	std::copy(values.begin(), values.end(), ps.values().begin() + static_cast<long>(t->offset));
}

void randomize(ParamStore &ps, std::mt19937_64 &rng, double scale) {
	std::uniform_real_distribution<double> u(-scale, scale);
	for (double &v : ps.values()) {
		v = u(rng);
	}
}

double sigmoid(double x) {
	return 1.0 / (1.0 + std::exp(-x));
}

} // namespace

TEST_CASE("fnn forward by hand") {
	FnnNet net(2, {1});
	set(net.params(), "W[1]", {1.0, -0.5});
	set(net.params(), "b[1]", {0.2});
	set(net.params(), "W_out", {2.0});
	set(net.params(), "b_out", {0.1});
	double x[] = {0.4, 0.6};
	CHECK(net.forward(x) == doctest::Approx(0.7).epsilon(1e-15));
	// Negative pre-activation contributes nothing.
	double neg[] = {-1.0, 1.0};
	CHECK(net.forward(neg) == 0.1);
}

TEST_CASE("fnn relu kink uses a zero subgradient in both passes") {
	FnnNet net(2, {1});
	set(net.params(), "W[1]", {1.0, 0.0});
	set(net.params(), "b[1]", {0.0});
	set(net.params(), "W_out", {3.0});
	set(net.params(), "b_out", {0.0});
	const std::size_t b1 = net.params().find("b[1]")->offset;

	auto grad_at = [&](double x0) {
		Matrix in(1, 2);
		in(0, 0) = x0;
		in(0, 1) = 1.0;
		std::vector<double> target{1.0};
		std::vector<std::size_t> rows{0};
		std::vector<double> g(net.params().size());
		net.loss_and_gradient(in, target, rows, g);
		return g[b1];
	};
	// Exactly at the kink the unit is treated as inactive.
	CHECK(grad_at(0.0) == 0.0);
	// Left of the kink the loss is flat in b[1]; right of it the slope is
	// 2 (y - t) * w_out.
	CHECK(grad_at(-1e-3) == 0.0);
	CHECK(grad_at(1e-3) == doctest::Approx(2.0 * (3e-3 - 1.0) * 3.0).epsilon(1e-12));
	// The forward pass agrees: a tiny step below zero changes nothing.
	double at[] = {0.0, 1.0};
	double below[] = {-1e-9, 1.0};
	CHECK(net.forward(at) == net.forward(below));
}

TEST_CASE("rnn forward by hand") {
	RecurrentNet net(CellKind::rnn, 1, 1, 1);
	set(net.params(), "W_h[1]", {0.5});
	set(net.params(), "W_x[1]", {1.0});
	set(net.params(), "b[1]", {0.1});
	set(net.params(), "W_out", {2.0});
	set(net.params(), "b_out", {-0.3});
	Matrix steps(2, 1);
	steps(0, 0) = 0.2;
	steps(1, 0) = -0.4;
	auto y = net.forward(steps);
	double h1 = std::tanh(0.2 + 0.1);
	double h2 = std::tanh(0.5 * h1 - 0.4 + 0.1);
	CHECK(y[0] == doctest::Approx(2.0 * h1 - 0.3).epsilon(1e-14));
	CHECK(y[1] == doctest::Approx(2.0 * h2 - 0.3).epsilon(1e-14));

	RecurrentNet zero(CellKind::rnn, 3, 4, 2);
	std::mt19937_64 rng(1);
	for (double v : zero.forward(testutil::random_matrix(6, 3, rng))) {
		CHECK(v == 0.0);
	}
}

TEST_CASE("lstm forward by hand") {
	RecurrentNet net(CellKind::lstm, 1, 1, 1);
	const double wh[] = {0.1, 0.2, 0.3, 0.4}, wx[] = {0.5, -0.6, 0.7, 0.8}, b[] = {0.1, 0.0, -0.1, 0.05};
	const char *gates[] = {"f", "i", "o", "C"};
	for (int g = 0; g < 4; ++g) {
		set(net.params(), std::string("W_") + gates[g] + "h[1]", {wh[g]});
		set(net.params(), std::string("W_") + gates[g] + "x[1]", {wx[g]});
		set(net.params(), std::string("b_") + gates[g] + "[1]", {b[g]});
	}
	set(net.params(), "W_out", {1.5});
	set(net.params(), "b_out", {0.2});
	const double xs[] = {0.3, -0.7, 1.1};
	Matrix steps(3, 1);
	for (int t = 0; t < 3; ++t) {
		steps(t, 0) = xs[t];
	}
	auto y = net.forward(steps);
	double h = 0.0, c = 0.0;
	for (int t = 0; t < 3; ++t) {
		double f = sigmoid(wh[0] * h + wx[0] * xs[t] + b[0]);
		double i = sigmoid(wh[1] * h + wx[1] * xs[t] + b[1]);
		double o = sigmoid(wh[2] * h + wx[2] * xs[t] + b[2]);
		double cand = std::tanh(wh[3] * h + wx[3] * xs[t] + b[3]);
		c = f * c + i * cand;
		h = o * std::tanh(c);
		CHECK(y[t] == doctest::Approx(1.5 * h + 0.2).epsilon(1e-14));
	}
}

TEST_CASE("lstm with zero parameters keeps zero state") {
	RecurrentNet net(CellKind::lstm, 4, 3, 1);
	std::mt19937_64 rng(2);
	auto tr = net.trace(testutil::random_matrix(5, 4, rng));
	const auto &L = tr.layers[0];
	for (std::size_t t = 0; t < 5; ++t) {
		for (std::size_t j = 0; j < 3; ++j) {
			CHECK(L.gates(t, j) == 0.5);
			CHECK(L.gates(t, 3 + j) == 0.5);
			CHECK(L.gates(t, 6 + j) == 0.5);
			CHECK(L.gates(t, 9 + j) == 0.0);
			CHECK(L.cell(t, j) == 0.0);
			CHECK(L.hidden(t, j) == 0.0);
		}
		CHECK(tr.outputs[t] == 0.0);
	}
}

TEST_CASE("activation ranges over random forward passes") {
	std::mt19937_64 rng(3);
	for (int draw = 0; draw < 20; ++draw) {
		RecurrentNet lstm(CellKind::lstm, 4, 8, 2);
		lstm.init(rng);
		RecurrentNet rnn(CellKind::rnn, 4, 8, 2);
		rnn.init(rng);
		Matrix steps = testutil::random_matrix(30, 4, rng, 3.0);
		auto lt = lstm.trace(steps);
		for (const auto &L : lt.layers) {
			for (std::size_t t = 0; t < steps.rows(); ++t) {
				for (std::size_t j = 0; j < 8; ++j) {
					for (int g = 0; g < 3; ++g) {
						double v = L.gates(t, g * 8 + j);
						CHECK((v > 0.0 && v < 1.0));
					}
					double cand = L.gates(t, 24 + j);
					CHECK((cand > -1.0 && cand < 1.0));
					CHECK((L.hidden(t, j) > -1.0 && L.hidden(t, j) < 1.0));
				}
			}
		}
		auto rt = rnn.trace(steps);
		for (const auto &L : rt.layers) {
			for (double v : L.hidden.flat()) {
				CHECK((v > -1.0 && v < 1.0));
			}
		}
	}
}

TEST_CASE("initialization") {
	std::mt19937_64 rng(4);
	RecurrentNet lstm(CellKind::lstm, 4, 6, 1);
	lstm.init(rng);
	const auto &ps = lstm.params();
	for (const char *name : {"b_i[1]", "b_o[1]", "b_C[1]", "b_out"}) {
		for (double v : ps.get(static_cast<std::size_t>(ps.find(name) - ps.tensors().data()))) {
			CHECK(v == 0.0);
		}
	}
	for (double v : ps.get(static_cast<std::size_t>(ps.find("b_f[1]") - ps.tensors().data()))) {
		CHECK(v == 1.0);
	}
	const double limit = std::sqrt(6.0 / (4.0 + 6.0));
	for (double v : ps.get(static_cast<std::size_t>(ps.find("W_Cx[1]") - ps.tensors().data()))) {
		CHECK(std::abs(v) <= limit);
	}
}

TEST_CASE("gradient checks against central differences") {
	std::mt19937_64 rng(10);

	SUBCASE("fnn") {
		double worst = 0.0;
		for (int draw = 0; draw < 20; ++draw) {
			FnnNet net(4, {6, 5});
			randomize(net.params(), rng, 0.8);
			Matrix x = testutil::random_matrix(8, 4, rng, 2.0);
			auto y = testutil::random_vector(8, rng);
			worst = std::max(worst, gradient_check(net, x, y));
		}
		MESSAGE("fnn worst relative error " << worst);
		CHECK(worst < 1e-4);
	}
	for (auto kind : {CellKind::rnn, CellKind::lstm}) {
		for (std::size_t layers : {1, 2}) {
			double worst = 0.0;
			for (int draw = 0; draw < 20; ++draw) {
				RecurrentNet net(kind, 3, 5, layers);
				randomize(net.params(), rng, 0.6);
				std::vector<Matrix> windows{testutil::random_matrix(10, 3, rng, 1.5),
				                            testutil::random_matrix(10, 3, rng, 1.5)};
				std::vector<std::vector<double>> targets{testutil::random_vector(10, rng),
				                                         testutil::random_vector(10, rng)};
				worst = std::max(worst, gradient_check(net, windows, targets));
			}
			MESSAGE(std::string(kind == CellKind::rnn ? "rnn" : "lstm") << " x" << layers << " worst relative error " << worst);
			CHECK(worst < 1e-4);
		}
	}
}

TEST_CASE("gradient check is sensitive: it flags the relu kink") {
	// At an exact kink the analytic subgradient is 0 while the central
	// difference averages both one-sided slopes.
	FnnNet net(2, {1});
	set(net.params(), "W[1]", {1.0, 0.0});
	set(net.params(), "b[1]", {0.0});
	set(net.params(), "W_out", {3.0});
	set(net.params(), "b_out", {0.0});
	Matrix x(1, 2);
	x(0, 1) = 1.0;
	std::vector<double> y{1.0};
	CHECK(gradient_check(net, x, y) > 0.5);
	x(0, 0) = 0.5;
	CHECK(gradient_check(net, x, y) < 1e-6);
}

TEST_CASE("network math is backend independent") {
	if (!kernels::backend_available(kernels::Backend::avx2)) {
		return;
	}
	auto saved = kernels::active().backend;
	std::mt19937_64 rng(12);
	RecurrentNet net(CellKind::lstm, 4, 16, 1);
	net.init(rng);
	Matrix steps = testutil::random_matrix(48, 4, rng);
	kernels::set_backend(kernels::Backend::scalar);
	auto a = net.forward(steps);
	kernels::set_backend(kernels::Backend::avx2);
	auto b = net.forward(steps);
	kernels::set_backend(saved);
	for (std::size_t t = 0; t < a.size(); ++t) {
		CHECK(std::abs(a[t] - b[t]) <= 1e-12);
	}
}
