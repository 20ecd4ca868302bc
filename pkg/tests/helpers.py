"""Independent reference implementations used as test oracles.

Everything here recomputes expected values from first principles (explicit
loops, closed-form layer sums, central finite differences) without touching
the library's own computation paths.
"""

import numpy as np
import torch


# ---------------------------------------------------------------------------
# metric oracles


def mse_reference(a, b):
    """Elementwise-loop mean squared error."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    total = 0.0
    for x, y in zip(a, b):
        total += (x - y) ** 2
    return total / a.size


def psnr_reference(pred, target, max_value=1.0):
    err = mse_reference(pred, target)
    if err == 0.0:
        return float("inf")
    return 10.0 * np.log10(max_value * max_value / err)


def ssim_reference(x, y, size=11, sigma=1.5, k1=0.01, k2=0.03, dynamic_range=1.0):
    """Per-window SSIM recomputed with explicit loops and centered moments."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    half = size // 2
    coords = np.arange(size, dtype=np.float64) - half
    w1 = np.exp(-(coords**2) / (2.0 * sigma * sigma))
    w1 /= w1.sum()
    w = np.outer(w1, w1)
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2
    h, wdt = x.shape
    vals = []
    for i in range(half, h - half):
        for j in range(half, wdt - half):
            px = x[i - half : i + half + 1, j - half : j + half + 1]
            py = y[i - half : i + half + 1, j - half : j + half + 1]
            mx = float((w * px).sum())
            my = float((w * py).sum())
            vx = float((w * (px - mx) ** 2).sum())
            vy = float((w * (py - my) ** 2).sum())
            cxy = float((w * (px - mx) * (py - my)).sum())
            vals.append(
                ((2 * mx * my + c1) * (2 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2))
            )
    return float(np.mean(vals))


# ---------------------------------------------------------------------------
# closed-form parameter counts (summed per layer, independently of torch)


def conv_params(k, c_in, c_out, bias=True):
    return k * k * c_in * c_out + (c_out if bias else 0)


def uconvertnet_param_count(levels=4, base=32):
    total = 0
    chans = [1] + [base * 2**i for i in range(levels)]
    for i in range(levels):
        total += conv_params(3, chans[i], chans[i + 1])
    total += conv_params(3, base * 2 ** (levels - 1), base * 2**levels)
    for i in reversed(range(levels)):
        c_hi, c_lo = base * 2 ** (i + 1), base * 2**i
        total += conv_params(2, c_hi, c_lo)          # transposed conv
        total += conv_params(3, 2 * c_lo, c_lo)      # conv after concat
    total += conv_params(3, base, 1)
    return total


def espcn_param_count(r=2, f0=64, f1=32):
    return (
        conv_params(5, r * r, f0)
        + conv_params(3, f0, f1)
        + conv_params(3, f1, r * r)
    )


def srgan_generator_param_count(blocks=8, ch=64):
    total = conv_params(9, 1, ch) + 1  # head conv + PReLU slope
    per_block = 2 * conv_params(3, ch, ch) + 2 * (2 * ch) + 1  # convs, BNs, PReLU
    total += blocks * per_block
    total += conv_params(3, ch, ch) + 2 * ch  # post conv + BN
    total += conv_params(9, ch, 1)
    return total


def srgan_discriminator_param_count(b=64, dense_width=1024):
    chans = [1, b, b, 2 * b, 2 * b, 4 * b, 4 * b, 8 * b, 8 * b]
    total = 0
    for i in range(8):
        total += conv_params(3, chans[i], chans[i + 1])
        if i > 0:
            total += 2 * chans[i + 1]  # batch-norm affine
    total += 8 * b * dense_width + dense_width
    total += dense_width * 1 + 1
    return total


# ---------------------------------------------------------------------------
# finite-difference gradient check


def max_gradient_rel_error(model, loss_fn, h=1e-6, jitter_seed=0):
    """Compare autograd gradients of loss_fn(model) against central differences.

    The model is cast to float64 and evaluated in eval mode so the loss is a
    deterministic function of the parameters. Parameters are jittered away
    from their init first: zero biases put ReLU pre-activations exactly on
    the kink, where the two-sided difference quotient is not the gradient.
    Relative error uses a 1e-4 denominator floor so near-zero gradients are
    compared absolutely.
    """
    model.double().eval()
    params = [p for p in model.parameters()]
    gen = torch.Generator().manual_seed(jitter_seed)
    with torch.no_grad():
        for p in params:
            p.add_(torch.empty_like(p).uniform_(-0.05, 0.05, generator=gen))
    model.zero_grad()
    loss_fn(model).backward()
    analytic = [p.grad.detach().clone() for p in params]
    worst = 0.0
    with torch.no_grad():
        for p, g in zip(params, analytic):
            flat = p.view(-1)
            gflat = g.view(-1)
            for k in range(flat.numel()):
                orig = flat[k].item()
                step = h * max(1.0, abs(orig))
                flat[k] = orig + step
                lp = loss_fn(model).item()
                flat[k] = orig - step
                lm = loss_fn(model).item()
                flat[k] = orig
                fd = (lp - lm) / (2.0 * step)
                a = gflat[k].item()
                rel = abs(a - fd) / max(abs(a), abs(fd), 1e-4)
                worst = max(worst, rel)
    return worst


# ---------------------------------------------------------------------------
# rearrangement oracle


def space_to_depth_reference(x, r):
    """Direct index-permutation space-to-depth for [N, C, H, W] arrays."""
    x = np.asarray(x)
    n, c, h, w = x.shape
    out = np.zeros((n, c * r * r, h // r, w // r), dtype=x.dtype)
    for b in range(n):
        for ch in range(c):
            for i in range(r):
                for j in range(r):
                    out[b, ch * r * r + i * r + j] = x[b, ch, i::r, j::r]
    return out


def depth_to_space_reference(x, r):
    x = np.asarray(x)
    n, c, h, w = x.shape
    c_out = c // (r * r)
    out = np.zeros((n, c_out, h * r, w * r), dtype=x.dtype)
    for b in range(n):
        for ch in range(c_out):
            for i in range(r):
                for j in range(r):
                    out[b, ch, i::r, j::r] = x[b, ch * r * r + i * r + j]
    return out


# ---------------------------------------------------------------------------
# misc


def mean_gradient_magnitude(data):
    """Mean finite-difference gradient magnitude of a 3D array."""
    g = np.gradient(np.asarray(data, dtype=np.float64))
    return float(np.sqrt(g[0] ** 2 + g[1] ** 2 + g[2] ** 2).mean())
