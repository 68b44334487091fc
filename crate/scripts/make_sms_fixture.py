#!/usr/bin/env python3
"""Generate data/sms_fixture.tsv: a synthetic stand-in for the SMS Spam
Collection with the same layout (label<TAB>message, no header).

Usage: python3 scripts/make_sms_fixture.py [--seed 7] [--ham 650] [--spam 350]
"""
import argparse
import random
from pathlib import Path

NAMES = ["Jo", "Sam", "mum", "dad", "Alex", "Priya", "Tom", "babe", "Kev", "Liz", "bro", "Nat"]
PLACES = ["the pub", "uni", "work", "town", "the gym", "Tesco", "the station", "home", "the library", "Dave's"]
TIMES = ["tonight", "tmrw", "later", "at 7", "after work", "this arvo", "on sat", "in 10 mins", "around 8", "sunday"]
FOOD = ["pizza", "curry", "chips", "lunch", "dinner", "a brew", "coffee", "takeaway"]
FEEL = ["tired", "knackered", "bored", "fine", "ok", "so happy", "gutted", "v busy", "ill"]
HAM = [
    "Hey {n}, are we still on for {f} {t}?",
    "Im at {p} now, wil be back {t}",
    "Can u pick up some milk on ur way home pls",
    "Sorry {n} cant talk rite now, call u {t}",
    "Ok lor. I'll meet u at {p} {t}",
    "Did u get my last msg? Let me know about {t}",
    "Feeling {e} today... might just stay in",
    "Haha that's so funny {n}! Tell me more {t}",
    "Dont forget {n}'s birthday {t}, we're getting {f}",
    "Wat time u finishing at {p}?",
    "Just got to {p}, where r u?",
    "Love you {n}, see you {t} xx",
    "K, I'll text u when I leave {p}",
    "Running late, traffic is mad. Be there {t}",
    "U coming to {p} {t}? Everyone's going",
    "Have u done the reading for {t}? I'm so behind",
    "Thanks for {f} yesterday {n}, was lovely",
    "No worries, we can do {f} another time",
    "Is {n} still {e}? Hope they feel better",
    "My phone's about to die, meet at {p} {t}",
    "Yeah sounds good. {f} {t} then",
    "Gonna be at {p} all day, ring me if u need anything",
    # ham that borrows spam vocabulary
    "Did u win anything on the raffle? {n} said the prize was {f}",
    "Call me when u get this, urgent-ish lol",
    "Got a free {f} voucher from work, want to come {t}?",
    "Text me ur new number {n}, I lost it",
    "Congrats on the new job!! Drinks at {p} {t}",
    "Claim ur seat at {p} before {n} takes it haha",
    "My new number is {num}, save it {n}",
    "Ring {n} on {num} if im not picking up",
]
PRIZES = ["£1000 cash", "a FREE holiday", "£500 Tesco voucher", "a brand new iPhone", "£2000 prize",
          "FREE ringtones", "a Nokia camera phone", "2 FREE cinema tickets", "£250 bonus"]
ACTIONS = ["Call {num}", "Text WIN to {short}", "Reply YES to {short}", "txt CLAIM to {short}",
           "Call now on {num}", "Send GO to {short}"]
SPAM = [
    "URGENT! You have won {prize}. {act} to claim. T&Cs apply",
    "Congratulations! Ur mobile no. was selected for {prize}! {act} now",
    "FREE entry into our weekly draw for {prize}. {act}. 18+ only",
    "You are a WINNER! {act} to receive {prize}. Valid 12hrs only",
    "Your account has a pending reward of {prize}. {act} before it expires",
    "{prize} is waiting for you! {act}. Cost 150p/msg",
    "PRIVATE! Your 2024 statement shows unclaimed {prize}. {act}. Box{box}",
    "Get {prize} when you upgrade today! {act}, stop to opt out",
    "Last chance! {prize} guaranteed. {act} or visit www.{site}.com",
    "Hi {n}, we tried to contact you re your {prize}. {act} ASAP",
    "Txt STOP to end. Otherwise {act} for {prize}. Std rates",
    # spam dressed up as chat
    "Hey its {n}! Been trying to reach u, {act} for a chat x",
    "Hi babe, im lonely {t}... {act} to meet local singles",
    "{n} has sent u a message. {act} to read it",
    "Ur friend {n} invited u to try our new game! {act}",
    "You have been specially selected for {prize}. Reply for details",
    "Dont miss out {n}, {prize} ends {t}",
]


def fill(tmpl, rng):
    act = rng.choice(ACTIONS).format(num="0" + "".join(rng.choice("0123456789") for _ in range(10)),
                                     short=str(rng.randint(80000, 89999)))
    return tmpl.format(num="07" + "".join(rng.choice("0123456789") for _ in range(9)), n=rng.choice(NAMES), p=rng.choice(PLACES), t=rng.choice(TIMES), f=rng.choice(FOOD),
                       e=rng.choice(FEEL), prize=rng.choice(PRIZES), act=act, box=rng.randint(100, 999),
                       site=rng.choice(["winprize", "claimnow", "txt4cash", "mobileoffer"]))


def typo(msg, rng):
    chars = list(msg)
    for _ in range(rng.randint(1, 3)):
        i = rng.randrange(len(chars))
        op = rng.random()
        if op < 0.4:
            del chars[i]
        elif op < 0.7 and i + 1 < len(chars):
            chars[i], chars[i + 1] = chars[i + 1], chars[i]
        else:
            chars.insert(i, rng.choice("abcdefghijklmnopqrstuvwxyz "))
    return "".join(chars)


def mutate(msg, rng):
    # noise: case, casual shortenings, trailing filler, typos
    if rng.random() < 0.2:
        msg = msg.lower()
    if rng.random() < 0.2:
        msg = msg.replace("you", "u").replace("are", "r")
    if rng.random() < 0.15:
        msg += rng.choice([" :)", " lol", "!!", " x", " ..."])
    if rng.random() < 0.3:
        msg = typo(msg, rng)
    return msg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--ham", type=int, default=650)
    ap.add_argument("--spam", type=int, default=350)
    ap.add_argument("--noise", type=float, default=0.04, help="fraction of flipped labels")
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "sms_fixture.tsv"))
    args = ap.parse_args()
    rng = random.Random(args.seed)
    rows = [("ham", mutate(fill(rng.choice(HAM), rng), rng)) for _ in range(args.ham)]
    rows += [("spam", mutate(fill(rng.choice(SPAM), rng), rng)) for _ in range(args.spam)]
    # annotation noise
    rows = [("spam" if l == "ham" else "ham", m) if rng.random() < args.noise else (l, m) for l, m in rows]
    rng.shuffle(rows)
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        for label, msg in rows:
            f.write(f"{label}\t{msg}\n")


if __name__ == "__main__":
    main()
