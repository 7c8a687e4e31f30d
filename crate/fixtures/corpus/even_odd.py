import sys

data = sys.stdin.read().split()
n = int(data[0]) if data else 0
evens = 0
odds = 0
for i in range(1, n + 1):
    x = int(data[i])
    if x % 2 == 0:
        evens += 1
    else:
        odds += 1
print(evens, odds)
