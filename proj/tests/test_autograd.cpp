#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#define PANOSR_TESTUTIL_AUTOGRAD
#include <filesystem>

#include "panosr/autograd/checkpoint.hpp"
#include "panosr/autograd/optim.hpp"
#include "testutil.hpp"

using namespace panosr;
using namespace panosr::ag;

TEST_CASE("elementwise and reduction gradients match finite differences") {
  Rng rng(11);
  const Var a = leaf(testutil::random_tensor({3, 4, 4}, rng), true);
  const Var b = leaf(testutil::random_tensor({3, 4, 4}, rng), true);
  auto build = [&]() {
    Var h = add(mul(a, b), scale(sub(a, b), 0.7));
    h = leaky_relu(h, 0.2);
    h = sigmoid(h);
    return mean_all(h);
  };
  Rng probe(12);
  CHECK(testutil::grad_check(build, {a, b}, probe, 16) < 1e-4);
}

TEST_CASE("conv2d gradients: stride 1, stride 2, groups") {
  Rng rng(13);
  const Var x = leaf(testutil::random_tensor({4, 6, 6}, rng), true);
  const Var w1 = leaf(testutil::random_tensor({6, 4, 3, 3}, rng, -0.4, 0.4),
                      true);
  const Var b1 = leaf(testutil::random_tensor({6}, rng), true);
  auto build1 = [&]() { return mean_all(conv2d(x, w1, b1, 1, 1, 1)); };
  Rng probe(14);
  CHECK(testutil::grad_check(build1, {x, w1, b1}, probe, 16) < 1e-4);

  const Var w2 = leaf(testutil::random_tensor({8, 4, 3, 3}, rng, -0.4, 0.4),
                      true);
  const Var b2 = leaf(testutil::random_tensor({8}, rng), true);
  auto build2 = [&]() {
    return mean_all(relu(conv2d(x, w2, b2, 2, 1, 1)));
  };
  CHECK(testutil::grad_check(build2, {x, w2, b2}, probe, 16) < 1e-4);

  const Var wg = leaf(testutil::random_tensor({4, 2, 3, 3}, rng, -0.4, 0.4),
                      true);
  auto build3 = [&]() {
    return mean_all(conv2d(x, wg, nullptr, 1, 1, 2));
  };
  CHECK(testutil::grad_check(build3, {x, wg}, probe, 16) < 1e-4);
}

TEST_CASE("linear/matmul/scale_rows/mix_rows/softmax gradients") {
  Rng rng(15);
  const Var x = leaf(testutil::random_tensor({5}, rng), true);
  const Var w = leaf(testutil::random_tensor({4, 5}, rng), true);
  const Var bias = leaf(testutil::random_tensor({4}, rng), true);
  const Var bank = leaf(testutil::random_tensor({4, 6}, rng), true);
  auto build = [&]() {
    const Var logits = linear(x, w, bias);
    const Var mix = mix_rows(bank, softmax(logits));
    return mean_all(mix);
  };
  Rng probe(16);
  CHECK(testutil::grad_check(build, {x, w, bias, bank}, probe, 16) < 1e-4);

  const Var A = leaf(testutil::random_tensor({3, 4}, rng), true);
  const Var B = leaf(testutil::random_tensor({4, 2}, rng), true);
  const Var s = leaf(testutil::random_tensor({3}, rng), true);
  auto build2 = [&]() { return mean_all(scale_rows(matmul(A, B), s)); };
  CHECK(testutil::grad_check(build2, {A, B, s}, probe, 12) < 1e-4);
}

TEST_CASE("shuffles are exact bijections with pass-through gradients") {
  Rng rng(17);
  const Tensor x = testutil::random_tensor({8, 6, 6}, rng);

  const Tensor down = pixel_unshuffle_tensor(x, 2);
  CHECK(down.shape() == std::vector<std::int64_t>{32, 3, 3});
  const Tensor back = pixel_shuffle_tensor(down, 2);
  CHECK(back.vec() == x.vec());

  // element multiset preserved per spatial location for channel shuffle
  const Tensor shuffled = channel_shuffle_tensor(x, 4);
  CHECK(shuffled.shape() == x.shape());
  const Tensor unshuffled = channel_shuffle_tensor(shuffled, 8 / 4);
  CHECK(unshuffled.vec() == x.vec());

  const Tensor same = channel_shuffle_tensor(x, 1);
  CHECK(same.vec() == x.vec());

  CHECK_THROWS(channel_shuffle_tensor(x, 3));
  CHECK_THROWS(pixel_unshuffle_tensor(x, 4));
  CHECK_THROWS(pixel_shuffle_tensor(x, 3));

  const Var v = leaf(x, true);
  auto build = [&]() {
    return mean_all(mul(pixel_shuffle(pixel_unshuffle(channel_shuffle(v, 4), 2), 2), v));
  };
  Rng probe(18);
  CHECK(testutil::grad_check(build, {v}, probe, 16) < 1e-4);
}

TEST_CASE("structural ops: concat, avg_pool2, bias, reshape") {
  Rng rng(19);
  const Var a = leaf(testutil::random_tensor({2, 4, 4}, rng), true);
  const Var b = leaf(testutil::random_tensor({3, 4, 4}, rng), true);
  const Var bias = leaf(testutil::random_tensor({5}, rng), true);
  auto build = [&]() {
    Var h = concat_channels(a, b);
    h = add_channel_bias(h, bias);
    h = avg_pool2(h);
    h = reshape(h, {5 * 2 * 2});
    return mean_all(mul(h, h));
  };
  Rng probe(20);
  CHECK(testutil::grad_check(build, {a, b, bias}, probe, 16) < 1e-4);
}

TEST_CASE("charbonnier: closed-form values and tight gradient check") {
  const double eps = 1e-3;
  Rng rng(21);
  const Tensor t = testutil::random_tensor({2, 3, 3}, rng, 0.0, 1.0);
  const Var p = leaf(t, true);
  const Var g = constant(t);
  // pred == gt -> exactly eps
  CHECK(charbonnier(p, g, eps)->value[0] == doctest::Approx(eps).epsilon(1e-12));

  // |pred-gt| = c >> eps -> approx c within eps^2/(2c)
  Tensor shifted = t;
  for (std::int64_t i = 0; i < shifted.numel(); ++i) shifted[i] += 0.25;
  const Var q = constant(shifted);
  const double got = charbonnier(p, q, eps)->value[0];
  CHECK(std::abs(got - 0.25) <= eps * eps / (2.0 * 0.25) + 1e-12);

  const Var target = constant(testutil::random_tensor({2, 3, 3}, rng, 0, 1));
  auto build = [&]() { return charbonnier(p, target, eps); };
  Rng probe(22);
  CHECK(testutil::grad_check(build, {p}, probe, 18, 1e-5) < 1e-4);
}

TEST_CASE("adam minimizes a quadratic deterministically") {
  auto run = [](std::uint64_t seed) {
    ParamStore store;
    Rng rng(seed);
    const Var x = store.add("x", testutil::random_tensor({8}, rng));
    Adam opt(store, 0.05);
    std::vector<double> losses;
    for (int step = 0; step < 200; ++step) {
      opt.zero_grad();
      const Var loss = mean_all(mul(x, x));
      backward(loss);
      opt.step();
      losses.push_back(loss->value[0]);
    }
    return losses;
  };
  const auto a = run(5);
  const auto b = run(5);
  CHECK(a == b);
  CHECK(a.back() < 0.05 * a.front());
}

TEST_CASE("lora conv: zero-init adapter is inert, gradients flow") {
  ParamStore store;
  Rng rng(23);
  LoraConv2d layer(store, "layer", 3, 5, 3, 4, rng);
  Conv2dLayer plain;
  // adapted weight equals base exactly for any d while up factors are zero
  const Var x = constant(testutil::random_tensor({3, 6, 6}, rng));
  const Var d1 = degradation_var(0.1, 0.9);
  const Var d2 = degradation_var(0.8, 0.2);
  const Var out1 = layer.forward(x, d1);
  const Var out2 = layer.forward(x, d2);
  CHECK(out1->value.vec() == out2->value.vec());
  const Var base_out =
      conv2d(x, layer.base_weight, layer.bias, layer.stride, layer.pad, 1);
  CHECK(out1->value.vec() == base_out->value.vec());

  // same d twice -> identical scales; scales continuous in d
  CHECK(layer.scales(d1)->value.vec() == layer.scales(d1)->value.vec());

  // randomize the up factor and check gradients through the adapter
  for (std::int64_t i = 0; i < layer.up->value.numel(); ++i)
    layer.up->value[i] = rng.uniform(-0.3, 0.3);
  auto build = [&]() { return mean_all(layer.forward(x, d1)); };
  Rng probe(24);
  CHECK(testutil::grad_check(
            build, {layer.down, layer.up, layer.embed_w, layer.embed_b},
            probe, 14) < 1e-4);
  CHECK_THROWS(degradation_var(1.2, 0.0));
}

TEST_CASE("checkpoint round trip and frozen hash") {
  namespace fs = std::filesystem;
  ParamStore store;
  Rng rng(25);
  store.add("m.a", testutil::random_tensor({3, 4}, rng));
  store.add("m.b", testutil::random_tensor({7}, rng), false);
  const auto hash_before = store.value_hash("m.b");

  const auto path =
      (fs::temp_directory_path() / "panosr_ckpt_test.bin").string();
  save_checkpoint(path, store, {{"variant", "full"}, {"note", "test"}});

  ParamStore loaded;
  Rng rng2(99);
  loaded.add("m.a", testutil::random_tensor({3, 4}, rng2));
  loaded.add("m.b", testutil::random_tensor({7}, rng2), false);
  const auto meta = load_checkpoint(path, loaded);
  CHECK(meta.get("variant") == "full");
  CHECK(loaded.find("m.a")->value.vec() == store.find("m.a")->value.vec());
  CHECK(loaded.value_hash("m.b") == hash_before);

  ParamStore wrong;
  wrong.add("m.a", Tensor({3, 4}));
  CHECK_THROWS(load_checkpoint(path, wrong));  // missing m.b
  fs::remove(path);
}
