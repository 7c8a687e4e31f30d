import sys


def is_prime(k):
    if k < 2:
        return False
    d = 2
    while d * d <= k:
        if k % d == 0:
            return False
        d += 1
    return True


data = sys.stdin.read().split()
n = int(data[0]) if data else 0
count = 0
for v in range(2, n + 1):
    if is_prime(v):
        count += 1
print(count)
