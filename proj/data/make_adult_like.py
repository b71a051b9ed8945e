"""Writes adult_like.csv, a small stand-in with census-style feature/label
structure, and adult_like_transcript.json, canned chat responses in the shape
an LLM returns (fenced JSON, a few malformed records) for offline runs."""
import csv
import json
import math
import random

rng = random.Random(7)
WORK = ["Private"] * 7 + ["Self-emp", "Local-gov", "State-gov", "Federal-gov"]
OCC = ["Admin", "Craft", "Exec-managerial", "Prof-specialty", "Sales", "Service"]
OCC_EFFECT = {"Admin": -0.2, "Craft": -0.1, "Exec-managerial": 0.9, "Prof-specialty": 0.8, "Sales": 0.1,
              "Service": -0.9}

def draw(rng):
    age = min(90, max(17, int(rng.gauss(39, 13))))
    edu = min(16, max(1, int(rng.gauss(10, 2.6))))
    if age < 25:
        marital = rng.choices(["Never-married", "Married", "Divorced"], [0.8, 0.17, 0.03])[0]
    else:
        marital = rng.choices(["Married", "Never-married", "Divorced", "Widowed"], [0.55, 0.2, 0.17, 0.08])[0]
    sex = "Male" if rng.random() < 0.67 else "Female"
    occ = rng.choice(OCC[2:4]) if edu >= 13 and rng.random() < 0.6 else rng.choice(OCC)
    work = rng.choice(WORK)
    hours = min(99, max(5, int(rng.gauss(41 if sex == "Male" else 36, 11))))
    gain = 0 if rng.random() < 0.9 else int(rng.lognormvariate(8.3, 1.0))
    z = (-7.2 + 0.045 * age - 0.0004 * (age - 45) ** 2 * 10 + 0.33 * edu + 1.4 * (marital == "Married")
         + OCC_EFFECT[occ] + 0.025 * hours + 0.3 * (sex == "Male") + (2.0 if gain > 5000 else 0.0))
    income = ">50K" if rng.random() < 1 / (1 + math.exp(-z)) else "<=50K"
    return [age, work, edu, marital, occ, sex, gain, hours, income]


rows = [draw(rng) for _ in range(1200)]

with open("adult_like.csv", "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["age", "workclass", "education_num", "marital_status", "occupation", "sex", "capital_gain",
                "hours_per_week", "income"])
    w.writerows(rows)
print(sum(r[-1] == ">50K" for r in rows), "of", len(rows), "positive")

NAMES = ["age", "workclass", "education_num", "marital_status", "occupation", "sex", "capital_gain",
         "hours_per_week", "income"]
llm = random.Random(11)
responses = []
for call in range(25):
    records = [dict(zip(NAMES, draw(llm))) for _ in range(50)]
    lines = [json.dumps(r) for r in records]
    if call % 5 == 2:
        lines[7] = lines[7][:-10]  # truncated record
        lines[19] = lines[19].replace('"income": ', '"label": ')
    responses.append("Here are the samples:\n```json\n[\n" + ",\n".join(lines) + "\n]\n```")
with open("adult_like_transcript.json", "w") as f:
    json.dump(responses, f, indent=0)
