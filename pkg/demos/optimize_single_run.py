#!/usr/bin/env python3
"""One full alternating-optimization run on the reference scenario.

Prints the per-iteration SINR trace and the final boresight angles, then
compares all four transmission schemes.
"""

import math

import numpy as np

from rashare import AlgoConfig, alternating_optimize, evaluate_scheme
from rashare.channel import default_scenario

sc = default_scenario()
print("Reference scenario: 4 rotatable elements, SR 50 m at 60 deg elevation,")
print("PR protected at -80 dBm, transmit budget 23 dBm, directivity p = 4.\n")

w, pointing, trace = alternating_optimize(sc, AlgoConfig())

print(f"{'iter':>4} {'SINR dB':>9} {'signal dBm':>11} {'leakage dBm':>12}")
for k, (g, s, l) in enumerate(zip(trace.sinr, trace.signal, trace.leakage)):
    print(f"{k:4d} {10 * math.log10(g):9.3f} {10 * math.log10(s) + 30:11.2f} {10 * math.log10(l) + 30:12.2f}")

print("\nfinal boresights (zenith, azimuth in degrees):")
for n, f in enumerate(pointing):
    zen = math.degrees(math.acos(min(1.0, f[2])))
    azi = math.degrees(math.atan2(f[1], f[0]))
    print(f"  element {n}: ({zen:5.2f}, {azi:+7.2f})")
u_sr = sc.sr_position / np.linalg.norm(sc.sr_position)
print(f"  receiver direction zenith: {math.degrees(math.acos(u_sr[2])):.2f} deg")

print("\nScheme comparison at the same scenario:")
print(f"{'scheme':>10} {'SINR dB':>9} {'leakage dBm':>12} {'iterations':>11}")
for scheme in ("ra", "fixed", "random", "isotropic"):
    res = evaluate_scheme(sc, scheme, AlgoConfig())
    leak_dbm = 10 * math.log10(res.interference) + 30 if res.interference > 0 else float("-inf")
    print(f"{scheme:>10} {10 * math.log10(res.sinr):9.3f} {leak_dbm:12.2f} {res.iterations:11d}")

print("\nRotating the boresights toward the receiver both raises its channel")
print("gain and decouples the array from the protected direction, which is")
print("where the gain over the fixed orientation comes from.")
