import sys

data = sys.stdin.read().split()
n = int(data[0]) if data else 0
xs = [int(t) for t in data[1:1 + n]]
acc = 0
prefix = []
for x in xs:
    acc += x
    prefix.append(acc)
print(" ".join(map(str, prefix)))
