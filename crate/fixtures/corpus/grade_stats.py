import sys

data = sys.stdin.read().split()
n = int(data[0]) if data else 0
scores = [int(t) for t in data[1:1 + n]]
if not scores:
    print("no scores")
else:
    total = 0
    for s in scores:
        total += s
    passed = 0
    for s in scores:
        # a valid passing score
        if s >= 60 and s <= 100:
            passed += 1
    print(total // len(scores), min(scores), max(scores), passed)
