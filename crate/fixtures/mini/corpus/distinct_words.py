def count_distinct(words):
    return len(set(words))


n = int(input())
words = [input().strip() for _ in range(n)]
print(count_distinct(words))
