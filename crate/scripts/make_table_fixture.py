#!/usr/bin/env python3
"""Generate data/conn_fixture.csv: a small synthetic connection-log table
(header row, mixed numeric and text columns, normal/attack label)."""
import random
from pathlib import Path

rng = random.Random(11)
out = Path(__file__).resolve().parent.parent / "data" / "conn_fixture.csv"
with open(out, "w", encoding="utf-8", newline="\n") as f:
    f.write("duration,protocol,service,src_bytes,dst_bytes,rate,class\n")
    for i in range(160):
        attack = i % 3 == 0
        if attack:
            row = [0, "icmp" if rng.random() < 0.6 else "tcp", rng.choice(["ecr_i", "private", "other"]),
                   rng.choice([520, 1032, 0]), 0, round(rng.uniform(0.9, 1.0), 2), "attack"]
        else:
            row = [rng.randint(0, 30), "tcp" if rng.random() < 0.8 else "udp", rng.choice(["http", "smtp", "ftp", "domain_u"]),
                   rng.randint(100, 3000), rng.randint(200, 20000), round(rng.uniform(0.0, 0.2), 2), "normal"]
        f.write(",".join(map(str, row)) + "\n")
