n = int(input())
goods1, goods2, goods3, goods4, goods5, goods6, goods7, goods8, goods9, goods10 = [], [], [], [], [], [], [], [], [], []
count = 0

for _ in range(n):
    check = input()
    finder = len(check)
    if finder == 1:
        if check not in goods1:
            goods1.append(check)
            count += 1
    if finder == 2:
        if check not in goods2:
            goods2.append(check)
            count += 1
    if finder == 3:
        if check not in goods3:
            goods3.append(check)
            count += 1
    if finder == 4:
        if check not in goods4:
            goods4.append(check)
            count += 1
    if finder == 5:
        if check not in goods5:
            goods5.append(check)
            count += 1
    if finder == 6:
        if check not in goods6:
            goods6.append(check)
            count += 1
    if finder == 7:
        if check not in goods7:
            goods7.append(check)
            count += 1
    if finder == 8:
        if check not in goods8:
            goods8.append(check)
            count += 1
    if finder == 9:
        if check not in goods9:
            goods9.append(check)
            count += 1
    if finder == 10:
        if check not in goods10:
            goods10.append(check)
            count += 1
print(count)
