import sys


def gcd(a, b):
    while b > 0:
        a, b = b, a % b
    return a


def lcm(a, b):
    if a == 0 or b == 0:
        return 0
    return a // gcd(a, b) * b


data = sys.stdin.read().split()
x = int(data[0]) if len(data) > 0 else 0
y = int(data[1]) if len(data) > 1 else 0
print(gcd(x, y), lcm(x, y))
