#include <iostream>
#include <vector>
using namespace std;

int logic(const vector<int>& args) {
    int sum = 0;
    for (int x : args) {
        sum += x;
    }
    return sum;
}

int main(int argc, char** argv) {
    vector<int> args;
    for (int i = 1; i < argc; ++i) {
        args.push_back(atoi(argv[i]));
    }
    cout << "Result: " << logic(args) << endl;
    return 0;
}
