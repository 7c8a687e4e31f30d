VOWELS = "aeiou"


def vowels_in(word):
    total = 0
    for ch in word:
        if ch in VOWELS:
            total += 1
    return total


n = int(input())
total = 0
for _ in range(n):
    total += vowels_in(input().strip().lower())
print(total)
