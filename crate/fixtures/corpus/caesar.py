def shift(word, k):
    out = []
    for ch in word:
        if "a" <= ch <= "z":
            out.append(chr((ord(ch) - ord("a") + k) % 26 + ord("a")))
        else:
            out.append(ch)
    return "".join(out)


n = int(input())
for _ in range(n):
    print(shift(input().strip(), 1))
