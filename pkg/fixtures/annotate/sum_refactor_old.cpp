#include <iostream>
#include <vector>
using namespace std;

int main(int argc, char** argv) {
    vector<int> args;
    for (int i = 1; i < argc; ++i) {
        args.push_back(atoi(argv[i]));
    }
    int sum = 0;
    for (int x : args) {
        sum += x;
    }
    cout << "Result: " << sum << endl;
    return 0;
}
